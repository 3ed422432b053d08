#pragma once

#include <vector>

#include "ags/common/math.hpp"
#include "ags/common/pose.hpp"

namespace ags::splat {

// One anisotropic 3D Gaussian. rotation is a unit quaternion (w, x, y, z).
struct Gaussian3D {
    int id = 0;
    Vec3 mu = Vec3::Zero();
    Vec3 scale = Vec3::Constant(0.05);
    Vec4 rotation = Vec4(1.0, 0.0, 0.0, 0.0);
    double opacity = 1.0;
    Vec3 color = Vec3::Zero();

    // 3x3 world-space covariance R S^2 R^T.
    Mat3 covariance() const;

    bool is_valid() const;
    bool operator==(const Gaussian3D&) const = default;
};

using Scene = std::vector<Gaussian3D>;

// Next free id for a scene (max id + 1, or 0 when empty).
int next_gaussian_id(const Scene& scene);

struct CameraIntrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;

    bool is_valid() const {
        return fx > 0.0 && fy > 0.0 && cx >= 0.0 && cx < width && cy >= 0.0 && cy < height && width > 0 &&
               height > 0;
    }
    bool operator==(const CameraIntrinsics&) const = default;
};

// Screen-space footprint of a Gaussian.
struct Gaussian2D {
    int id = 0;
    int source = 0;  // index into the projected Scene
    Vec2 mean = Vec2::Zero();
    Mat2 cov = Mat2::Identity();
    Mat2 conic = Mat2::Identity();  // cov^-1
    Vec2 extent = Vec2::Ones();     // half-size of the 3-sigma bounding box
    double depth = 0.0;
    double opacity = 1.0;
    Vec3 color = Vec3::Zero();
};

inline constexpr double kNearPlane = 0.01;
inline constexpr double kCovarianceDilation = 0.3;
inline constexpr double kAlphaMax = 0.99;
inline constexpr double kTransmittanceCutoff = 1e-4;
// A Gaussian is evaluated at every pixel inside the axis-aligned box of its
// 3-sigma ellipse, the same box used for tile intersection.
inline constexpr double kSupportSigmas = 3.0;

}  // namespace ags::splat
