#pragma once

#include <cstdint>
#include <vector>

#include "ags/common/image.hpp"
#include "ags/common/parallel.hpp"

namespace ags::codec {

// round(255 * (0.299 R + 0.587 G + 0.114 B)), channels clamped to [0, 1].
ImageLuma to_luma(const ImageRGB& rgb);

// One macro-block; samples are row-major, block_size^2 long.
struct MacroBlock {
    int x0 = 0;
    int y0 = 0;
    int size = 8;
    std::vector<std::uint8_t> samples;
};

// Cuts `luma` into blocks, edge-replicating past the image border.
struct MacroBlockGrid {
    int block_size = 8;
    int blocks_x = 0;
    int blocks_y = 0;
    std::vector<MacroBlock> blocks;  // row-major

    MacroBlockGrid(const ImageLuma& luma, int block_size = 8);
};

std::uint32_t block_sad(const MacroBlock& a, const MacroBlock& b);

// The block with origin (x0, y0) in the current frame best matches the
// previous frame's block at (x0 + dx, y0 + dy).
struct MotionResult {
    int x0 = 0;
    int y0 = 0;
    int size = 8;
    int dx = 0;
    int dy = 0;
    std::uint32_t sad_min = 0;
};

// SAD between `block` and the edge-replicated block of `prev` at
// (block.x0 + dx, block.y0 + dy).
std::uint32_t sad_at(const MacroBlock& block, const ImageLuma& prev, int dx, int dy);

// Exhaustive integer search over |dx|, |dy| <= radius. Ties go to the
// smallest |dx| + |dy|, then to the first offset in row-major (dy, dx) order.
MotionResult motion_search(const MacroBlock& block, const ImageLuma& prev, int search_radius = 8);

struct MotionConfig {
    int block_size = 8;
    int search_radius = 8;
    Exec exec = Exec::kParallel;
};

std::vector<MotionResult> motion_field(const ImageLuma& cur, const ImageLuma& prev, const MotionConfig& cfg = {});

}  // namespace ags::codec
