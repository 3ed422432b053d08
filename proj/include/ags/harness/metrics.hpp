#pragma once

#include <span>
#include <vector>

#include "ags/common/image.hpp"

namespace ags::harness {

// RMSE of translational residuals after the least-squares rigid alignment
// of `estimated` onto `reference`. Throws std::invalid_argument on a length
// mismatch or fewer than two positions.
double ate_rmse(std::span<const Vec3> estimated, std::span<const Vec3> reference);

// Same, on camera centres of world-to-camera poses.
double ate_rmse(std::span<const Pose> estimated, std::span<const Pose> reference);

// 10 log10(1 / MSE) over all channels; +infinity when the images are equal.
double psnr(const ImageRGB& rendered, const ImageRGB& reference);

}  // namespace ags::harness
