#pragma once

#include <cstdint>

#include "ags/common/image.hpp"

namespace ags::splat {

inline constexpr double kDefaultDepthWeight = 0.5;

// Mean over pixels of the per-pixel L1 colour error (summed over channels),
// plus lambda_depth times the mean L1 depth error over pixels whose observed
// depth is valid (> 0).
double photometric_depth_loss(const ImageRGB& color, const ImageDepth& depth, const Frame& observed,
                              double lambda_depth = kDefaultDepthWeight);

// Per-pixel upstream gradients of photometric_depth_loss.
struct LossGradient {
    double loss = 0.0;
    ImageRGB d_color;
    ImageDepth d_depth;
};

// Pixels flagged non-zero in `ignore` (same shape, or empty) contribute
// neither loss nor gradient; the normalisers still count them.
LossGradient photometric_depth_loss_grad(const ImageRGB& color, const ImageDepth& depth, const Frame& observed,
                                         double lambda_depth = kDefaultDepthWeight,
                                         const Image<std::uint8_t>* ignore = nullptr);

}  // namespace ags::splat
