#pragma once

#include <cstdint>
#include <vector>

#include "ags/codec/motion.hpp"

namespace ags::codec {

// fc compares the motion-compensated residual against the texture of the
// reference frame:
//   fc = 1 - total_sad / max(reference_activity, W*H), clamped to [0, 1]
// where reference_activity sums, over the reference frame's blocks, the
// absolute deviation of each sample from its block mean.
struct CovisibilityReport {
    std::uint64_t total_sad = 0;
    std::uint64_t reference_activity = 0;
    double fc = 1.0;
    int level = 5;
    std::vector<MotionResult> motion;
};

std::uint64_t block_activity(const MacroBlock& block);

double covisibility_fc(std::uint64_t total_sad, std::uint64_t reference_activity, int width, int height);

// 1 + floor(5 fc), capped at 5.
int covisibility_level(double fc);

CovisibilityReport covisibility_from_luma(const ImageLuma& cur, const ImageLuma& prev, const MotionConfig& cfg = {});

CovisibilityReport frame_covisibility(const Frame& cur, const Frame& prev, const MotionConfig& cfg = {});

}  // namespace ags::codec
