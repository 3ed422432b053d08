#pragma once

#include "ags/splat/gaussian.hpp"

namespace ags::splat {

// Intermediate quantities of the EWA projection, shared by the forward
// projection and its adjoint.
struct ProjectionTerms {
    bool visible = false;
    Vec3 p_cam = Vec3::Zero();  // camera-frame centre
    double quat_norm = 1.0;
    Vec4 quat_unit = Vec4(1, 0, 0, 0);
    Mat3 rot = Mat3::Identity();    // Gaussian orientation
    Mat3 sigma = Mat3::Identity();  // world covariance
    Mat3 sigma_cam = Mat3::Identity();  // W sigma W^T
    Mat23 jacobian = Mat23::Zero();
    Mat2 cov = Mat2::Identity();  // dilated screen covariance
    Vec2 mean = Vec2::Zero();
};

inline ProjectionTerms projection_terms(const Gaussian3D& g, const Pose& pose, const CameraIntrinsics& intr) {
    ProjectionTerms t;
    t.p_cam = pose.transform(g.mu);
    const double z = t.p_cam.z();
    if (!(z > kNearPlane)) return t;
    t.visible = true;
    const double x = t.p_cam.x(), y = t.p_cam.y();

    t.quat_norm = g.rotation.norm();
    t.quat_unit = g.rotation / t.quat_norm;
    t.rot = quat_to_rotation(t.quat_unit);
    const Vec3 s2 = g.scale.cwiseProduct(g.scale);
    t.sigma = t.rot * s2.asDiagonal() * t.rot.transpose();
    t.sigma_cam = pose.R * t.sigma * pose.R.transpose();

    const double inv_z = 1.0 / z;
    const double inv_z2 = inv_z * inv_z;
    t.jacobian << intr.fx * inv_z, 0.0, -intr.fx * x * inv_z2,
                  0.0, intr.fy * inv_z, -intr.fy * y * inv_z2;
    t.cov = t.jacobian * t.sigma_cam * t.jacobian.transpose();
    t.cov(0, 1) = t.cov(1, 0) = 0.5 * (t.cov(0, 1) + t.cov(1, 0));
    t.cov(0, 0) += kCovarianceDilation;
    t.cov(1, 1) += kCovarianceDilation;
    t.mean = Vec2(intr.fx * x * inv_z + intr.cx, intr.fy * y * inv_z + intr.cy);
    return t;
}

}  // namespace ags::splat
