#pragma once

#include <cstdint>
#include <vector>

#include "ags/sim/gpe.hpp"
#include "ags/sim/tables.hpp"

namespace ags::sim {

// Timing-relevant summary of one rendered frame.
struct RenderWork {
    // One entry per 4x4 pixel group: evaluated Gaussians per pixel.
    std::vector<std::vector<std::uint32_t>> groups;
    std::uint64_t table_entries = 0;  // Gaussian fetches across all tile tables
    std::uint64_t gaussians = 0;      // distinct projected Gaussians
    std::vector<TileDeltas> tile_deltas;  // contribution increments, key frames only

    bool operator==(const RenderWork&) const = default;
};

// One forward pass (and optionally the backward pass and parameter
// write-back) over `work` on `gpe_groups` groups. Pixel groups are dealt to
// the least-loaded GPE group in order; compute and DRAM transfer overlap.
SimStats simulate_render_job(const RenderWork& work, const HardwareConfig& cfg, int gpe_groups, bool scheduler_on,
                             bool backward, bool write_back);

// ceil(mac_count / systolic_macs) + systolic_overhead.
std::uint64_t simulate_coarse_estimator(std::uint64_t mac_count, const HardwareConfig& cfg);

// FC detection engine: reads one SAD per block, accumulates and compares.
SimStats simulate_fc_detection(std::uint32_t blocks, const HardwareConfig& cfg);

// Per-frame work descriptor, recorded by the functional run.
struct FrameTask {
    int frame = 0;
    std::uint32_t covis_blocks = 0;  // 0: no FC detection
    bool coarse = false;
    std::uint64_t coarse_macs = 0;
    int refine_iters = 0;
    RenderWork track_render;
    // Alignment against a rendered model frame: one forward-only render plus
    // a block search charged to the systolic array. Unused when align_macs == 0.
    std::uint64_t align_macs = 0;
    RenderWork align_render;
    int map_passes = 0;  // forward + backward passes of mapping
    RenderWork map_render;
    bool log_contributions = false;  // key frame with the logging table active
    std::uint64_t skip_records = 0;  // non-key frame: records read by the skipping table

    bool operator==(const FrameTask&) const = default;
};

struct StageTimes {
    std::uint64_t tracking = 0;
    std::uint64_t mapping = 0;
};

// Tracking of frame t starts when tracking of t-1 ends; mapping of t starts
// once its own tracking and the mapping of t-1 are both done.
std::uint64_t pipelined_makespan(const std::vector<StageTimes>& frames);
std::uint64_t serialized_makespan(const std::vector<StageTimes>& frames);

struct PipelineResult {
    SimStats stats;  // total_cycles = makespan of the requested schedule
    std::uint64_t pipelined = 0;
    std::uint64_t serialized = 0;
    std::vector<StageTimes> frames;
};

// Throws std::invalid_argument on an empty schedule.
PipelineResult simulate_pipeline(const std::vector<FrameTask>& tasks, const HardwareConfig& cfg, bool scheduler_on,
                                 bool pipelined);

}  // namespace ags::sim
