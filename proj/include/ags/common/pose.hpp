#pragma once

#include "ags/common/math.hpp"

namespace ags {

// Rigid world-to-camera transform: p_cam = R * p_world + t.
// Perturbations are applied on the left (in the camera frame) with a
// twist ordered (translation, rotation).
struct Pose {
    Mat3 R = Mat3::Identity();
    Vec3 t = Vec3::Zero();

    static Pose identity() { return {}; }

    // SE(3) exponential of the twist (rho, omega).
    static Pose exp(const Vec6& xi);

    Vec3 transform(const Vec3& p) const { return R * p + t; }
    Pose inverse() const { return {R.transpose(), -R.transpose() * t}; }
    Pose operator*(const Pose& rhs) const { return {R * rhs.R, R * rhs.t + t}; }

    // Camera centre in world coordinates.
    Vec3 center() const { return -R.transpose() * t; }

    bool is_valid(double tol = 1e-6) const;

    // Rotation Frobenius distance plus translation L2 distance.
    double distance(const Pose& other) const { return (R - other.R).norm() + (t - other.t).norm(); }

    bool operator==(const Pose& other) const { return R == other.R && t == other.t; }
};

}  // namespace ags
