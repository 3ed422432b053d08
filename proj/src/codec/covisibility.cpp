#include "ags/codec/covisibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace ags::codec {

std::uint64_t block_activity(const MacroBlock& block) {
    const std::int64_t n = static_cast<std::int64_t>(block.samples.size());
    if (n == 0) return 0;
    std::int64_t sum = 0;
    for (auto s : block.samples) sum += s;
    const std::int64_t mean = (sum + n / 2) / n;
    std::uint64_t act = 0;
    for (auto s : block.samples) act += static_cast<std::uint64_t>(std::llabs(s - mean));
    return act;
}

double covisibility_fc(std::uint64_t total_sad, std::uint64_t reference_activity, int width, int height) {
    const double norm = std::max(static_cast<double>(reference_activity), static_cast<double>(width) * height);
    if (norm <= 0.0) return 1.0;
    return std::clamp(1.0 - static_cast<double>(total_sad) / norm, 0.0, 1.0);
}

int covisibility_level(double fc) {
    return std::min(5, 1 + static_cast<int>(std::floor(5.0 * fc)));
}

CovisibilityReport covisibility_from_luma(const ImageLuma& cur, const ImageLuma& prev, const MotionConfig& cfg) {
    if (!cur.same_shape(prev)) throw std::invalid_argument("frame_covisibility: frame dimensions differ");
    CovisibilityReport r;
    r.motion = motion_field(cur, prev, cfg);
    for (const auto& m : r.motion) r.total_sad += m.sad_min;
    for (const auto& b : MacroBlockGrid(prev, cfg.block_size).blocks) r.reference_activity += block_activity(b);
    r.fc = covisibility_fc(r.total_sad, r.reference_activity, cur.width, cur.height);
    r.level = covisibility_level(r.fc);
    return r;
}

CovisibilityReport frame_covisibility(const Frame& cur, const Frame& prev, const MotionConfig& cfg) {
    return covisibility_from_luma(to_luma(cur.rgb), to_luma(prev.rgb), cfg);
}

}  // namespace ags::codec
