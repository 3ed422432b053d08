#pragma once

#include <vector>

#include "ags/sim/gpe.hpp"
#include "ags/sim/workload.hpp"
#include "ags/splat/raster.hpp"

namespace ags::harness {

// Pixel position of each GPE slot of one 4x4 group.
struct GroupPixels {
    int tile = 0;
    std::vector<int> local;  // tile-local pixel indices, row-major within the group
};

// Splits every tile of a render into 4x4 pixel groups, tile by tile.
std::vector<GroupPixels> pixel_groups(const splat::RenderResult& render);

// Full evaluation lists (alpha, colour, depth) per group, for functional
// replay on the simulator.
std::vector<sim::GroupTrace> group_traces(const splat::RenderResult& render);

// Timing summary of a render. With `deltas`, per-tile contribution
// increments (alpha < thresh_alpha) are attached for the logging table.
sim::RenderWork render_work(const splat::RenderResult& render, bool deltas, double thresh_alpha);

}  // namespace ags::harness
