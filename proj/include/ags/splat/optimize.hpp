#pragma once

#include <span>

#include "ags/splat/gradients.hpp"

namespace ags::splat {

struct LearningRates {
    double mu = 1e-3;
    double color = 2.5e-2;
    double opacity = 5e-2;
    double scale = 1e-3;
    double rotation = 1e-3;
    double pose = 2e-3;
};

inline constexpr double kMinScale = 1e-6;

// One gradient-descent step. `grads` is indexed like `scene`; entries past
// its end are treated as zero.
Scene update_gaussians(const Scene& scene, std::span<const GaussianGradient> grads, const LearningRates& lr);

// Left-multiplied se(3) descent step.
Pose update_pose(const Pose& pose, const Vec6& grad, double lr);

struct DensifyOptions {
    int block_size = 4;
    double transmittance_threshold = 0.5;
    double scale_factor = 1.5;  // isotropic scale = factor * depth / fx
    double opacity = 0.5;
    // Mean absolute RGB error above which a covered pixel also qualifies;
    // 0 disables. Needs the rendered colour.
    double color_error_threshold = 0.1;
};

// Spawns at most one Gaussian per block: the pixel with the largest final
// transmittance above the threshold (first in row-major order on ties) among
// pixels with valid depth, back-projected with the observed depth and colour.
// Blocks without such a pixel fall back to the pixel with the largest colour
// error above color_error_threshold when `rendered` is given. Pixels set in
// `frozen` are not eligible for that fallback.
Scene densify(const Scene& scene, const Frame& frame, const Pose& pose, const CameraIntrinsics& intr,
              const RenderAux& aux, const DensifyOptions& options = {}, const ImageRGB* rendered = nullptr,
              const Image<std::uint8_t>* frozen = nullptr);

}  // namespace ags::splat
