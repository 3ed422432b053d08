#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ags/splat/loss.hpp"
#include "ags/splat/raster.hpp"

namespace ags::splat {

struct GaussianGradient {
    Vec3 mu = Vec3::Zero();
    Vec3 scale = Vec3::Zero();
    Vec4 rotation = Vec4::Zero();
    double opacity = 0.0;
    Vec3 color = Vec3::Zero();

    bool is_zero() const;
    bool operator==(const GaussianGradient&) const = default;
};

// Loss gradient with respect to one projected Gaussian's screen-space
// parameters, summed over the pixels it was blended into.
struct ScreenGradient {
    Vec2 mean = Vec2::Zero();
    Mat2 conic = Mat2::Zero();
    double opacity = 0.0;
    Vec3 color = Vec3::Zero();
    double depth = 0.0;
};

struct GradientOptions {
    double lambda_depth = kDefaultDepthWeight;
    RenderOptions render;
    bool want_gaussians = true;
    bool want_pose = true;
    const Image<std::uint8_t>* ignore_pixels = nullptr;  // see photometric_depth_loss_grad
};

struct GradientResult {
    double loss = 0.0;
    std::vector<GaussianGradient> gaussians;  // indexed like the scene
    Vec6 pose = Vec6::Zero();                 // left se(3) perturbation, (rho, omega)
    RenderResult render;
};

// Back-propagates per-pixel upstream gradients through the blend recorded in
// `render`. Result is indexed like render.projected. Tiles are processed
// independently and reduced in tile order.
std::vector<ScreenGradient> backward_blend(const RenderResult& render, const ImageRGB& d_color,
                                           const ImageDepth& d_depth, Exec exec = Exec::kParallel);

// Renders `frame` from `pose`, evaluates the loss and back-propagates it to
// every Gaussian parameter and to the pose. Excluded Gaussians (see
// project_gaussians) get zero gradients.
GradientResult loss_and_gradients(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr,
                                  const Frame& frame, const GradientOptions& options = {},
                                  std::span<const std::uint8_t> exclude = {});

std::vector<GaussianGradient> gaussian_gradients(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr,
                                                 const Frame& frame, const GradientOptions& options = {});

Vec6 pose_gradient(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr, const Frame& frame,
                   const GradientOptions& options = {});

}  // namespace ags::splat
