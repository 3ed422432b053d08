#pragma once

#include <span>

#include "ags/common/pose.hpp"

namespace ags {

// Least-squares rigid transform (no scale) taking src[i] onto dst[i]:
// minimises sum |R src_i + t - dst_i|^2. Requires matching, non-empty spans.
Pose rigid_align(std::span<const Vec3> src, std::span<const Vec3> dst);

}  // namespace ags
