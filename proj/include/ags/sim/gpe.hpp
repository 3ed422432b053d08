#pragma once

#include <cstdint>
#include <vector>

#include "ags/common/math.hpp"
#include "ags/sim/stats.hpp"

namespace ags::sim {

inline constexpr int kGroupSize = 16;  // 4x4 GPEs, one pixel each

// One evaluated (pixel, Gaussian) pair in blend order.
struct EvalItem {
    int gaussian_id = 0;
    double alpha = 0.0;
    Vec3 color = Vec3::Zero();
    double depth = 0.0;
};

// Work of one 4x4 group: per pixel, the Gaussians it evaluates up to its
// termination point.
struct GroupTrace {
    std::vector<std::vector<EvalItem>> pixels;
};

struct PixelOutput {
    Vec3 color = Vec3::Zero();
    double depth = 0.0;
    double transmittance = 1.0;
};

struct TileSimResult {
    SimStats stats;  // per_gpe has one entry per pixel
    std::vector<PixelOutput> pixels;
};

// Cycle-stepped model of one GPE group. Every Gaussian costs c_alpha
// cycles of alpha computation then c_blend cycles of blending. With the
// scheduler on, a GPE that has finished its own pixel assists the GPE with
// the most remaining Gaussians: it claims the first unclaimed entry at
// least two positions ahead of the target's current one, computes its alpha
// and parks it in the target's alpha buffer. The target then pays only
// c_blend for that entry. Throws std::invalid_argument for more than
// kGroupSize pixels.
TileSimResult simulate_tile_render(const GroupTrace& trace, const HardwareConfig& cfg, bool scheduler_on);

// Timing-only variant: pixel i evaluates counts[i] Gaussians.
SimStats simulate_group_counts(const std::vector<std::uint32_t>& counts, const HardwareConfig& cfg,
                               bool scheduler_on);

}  // namespace ags::sim
