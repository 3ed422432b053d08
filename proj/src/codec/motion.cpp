#include "ags/codec/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace ags::codec {

ImageLuma to_luma(const ImageRGB& rgb) {
    ImageLuma out(rgb.width, rgb.height);
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        const Vec3 c = rgb.data[i].cwiseMax(0.0).cwiseMin(1.0);
        const double y = 255.0 * (0.299 * c.x() + 0.587 * c.y() + 0.114 * c.z());
        out.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
    }
    return out;
}

MacroBlockGrid::MacroBlockGrid(const ImageLuma& luma, int size) : block_size(size) {
    if (size <= 0) throw std::invalid_argument("MacroBlockGrid: block size must be positive");
    blocks_x = (luma.width + size - 1) / size;
    blocks_y = (luma.height + size - 1) / size;
    blocks.reserve(static_cast<std::size_t>(blocks_x) * blocks_y);
    for (int by = 0; by < blocks_y; ++by) {
        for (int bx = 0; bx < blocks_x; ++bx) {
            MacroBlock b;
            b.x0 = bx * size;
            b.y0 = by * size;
            b.size = size;
            b.samples.resize(static_cast<std::size_t>(size) * size);
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x) b.samples[y * size + x] = luma.clamped(b.x0 + x, b.y0 + y);
            blocks.push_back(std::move(b));
        }
    }
}

std::uint32_t block_sad(const MacroBlock& a, const MacroBlock& b) {
    if (a.samples.size() != b.samples.size()) throw std::invalid_argument("block_sad: block sizes differ");
    std::uint32_t sad = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) sad += std::abs(int(a.samples[i]) - int(b.samples[i]));
    return sad;
}

std::uint32_t sad_at(const MacroBlock& block, const ImageLuma& prev, int dx, int dy) {
    std::uint32_t sad = 0;
    const int n = block.size;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const int ref = prev.clamped(block.x0 + x + dx, block.y0 + y + dy);
            sad += std::abs(int(block.samples[y * n + x]) - ref);
        }
    }
    return sad;
}

MotionResult motion_search(const MacroBlock& block, const ImageLuma& prev, int radius) {
    if (radius < 0) throw std::invalid_argument("motion_search: negative search radius");
    MotionResult best;
    best.x0 = block.x0;
    best.y0 = block.y0;
    best.size = block.size;
    best.sad_min = std::numeric_limits<std::uint32_t>::max();
    int best_l1 = std::numeric_limits<int>::max();
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const std::uint32_t sad = sad_at(block, prev, dx, dy);
            const int l1 = std::abs(dx) + std::abs(dy);
            if (sad < best.sad_min || (sad == best.sad_min && l1 < best_l1)) {
                best.sad_min = sad;
                best.dx = dx;
                best.dy = dy;
                best_l1 = l1;
            }
        }
    }
    return best;
}

std::vector<MotionResult> motion_field(const ImageLuma& cur, const ImageLuma& prev, const MotionConfig& cfg) {
    if (!cur.same_shape(prev)) throw std::invalid_argument("motion_field: frame dimensions differ");
    const MacroBlockGrid grid(cur, cfg.block_size);
    const int n = static_cast<int>(grid.blocks.size());
    std::vector<MotionResult> out(n);
    const bool parallel = cfg.exec == Exec::kParallel;
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < n; ++i) out[i] = motion_search(grid.blocks[i], prev, cfg.search_radius);
    return out;
}

}  // namespace ags::codec
