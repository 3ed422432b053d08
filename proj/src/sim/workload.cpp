#include "ags/sim/workload.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ags::sim {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

SimStats simulate_render_job(const RenderWork& work, const HardwareConfig& cfg, int gpe_groups, bool scheduler_on,
                             bool backward, bool write_back) {
    SimStats out;
    std::map<std::vector<std::uint32_t>, SimStats> memo;
    std::vector<std::uint64_t> load(static_cast<std::size_t>(std::max(1, gpe_groups)), 0);
    for (const auto& counts : work.groups) {
        auto it = memo.find(counts);
        if (it == memo.end()) it = memo.emplace(counts, simulate_group_counts(counts, cfg, scheduler_on)).first;
        const SimStats& fwd = it->second;
        std::uint64_t cycles = fwd.total_cycles;
        out.gpe += fwd.gpe;
        out.ops += fwd.ops;
        if (backward) {
            const std::uint32_t longest = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
            const std::uint64_t bwd = static_cast<std::uint64_t>(longest) * cfg.c_grad;
            for (std::uint32_t c : counts) {
                const std::uint64_t busy = static_cast<std::uint64_t>(c) * cfg.c_grad;
                out.gpe.busy += busy;
                out.gpe.idle += bwd - busy;
                out.ops.grad += c;
            }
            cycles += bwd;
        }
        auto slot = std::min_element(load.begin(), load.end());
        *slot += cycles;
    }
    const std::uint64_t compute = *std::max_element(load.begin(), load.end());
    out.dram_read_bytes = work.table_entries * static_cast<std::uint64_t>(cfg.gaussian_bytes);
    if (write_back) out.dram_write_bytes = work.gaussians * static_cast<std::uint64_t>(cfg.gaussian_bytes);
    const std::uint64_t bytes = out.dram_read_bytes + out.dram_write_bytes;
    const std::uint64_t bursts = ceil_div(bytes, static_cast<std::uint64_t>(cfg.gauss_buffer_bytes));
    out.total_cycles = std::max(compute, dram_cycles(bytes, bursts, cfg));
    return out;
}

std::uint64_t simulate_coarse_estimator(std::uint64_t mac_count, const HardwareConfig& cfg) {
    return ceil_div(mac_count, static_cast<std::uint64_t>(cfg.systolic_macs)) +
           static_cast<std::uint64_t>(cfg.systolic_overhead);
}

SimStats simulate_fc_detection(std::uint32_t blocks, const HardwareConfig& cfg) {
    SimStats out;
    if (blocks == 0) return out;
    out.ops.add = blocks;
    out.ops.compare = static_cast<std::uint64_t>(cfg.fc_comparators);
    out.dram_read_bytes = static_cast<std::uint64_t>(blocks) * cfg.sad_bytes;
    const std::uint64_t adds = ceil_div(blocks, static_cast<std::uint64_t>(cfg.fc_adders));
    out.total_cycles = std::max(adds, dram_cycles(out.dram_read_bytes, 1, cfg)) + 1;
    out.fc_cycles = out.total_cycles;
    return out;
}

std::uint64_t pipelined_makespan(const std::vector<StageTimes>& frames) {
    std::uint64_t track_end = 0, map_end = 0;
    for (const StageTimes& f : frames) {
        track_end += f.tracking;
        map_end = std::max(track_end, map_end) + f.mapping;
    }
    return std::max(track_end, map_end);
}

std::uint64_t serialized_makespan(const std::vector<StageTimes>& frames) {
    std::uint64_t total = 0;
    for (const StageTimes& f : frames) total += f.tracking + f.mapping;
    return total;
}

PipelineResult simulate_pipeline(const std::vector<FrameTask>& tasks, const HardwareConfig& cfg, bool scheduler_on,
                                 bool pipelined) {
    if (tasks.empty()) throw std::invalid_argument("simulate_pipeline: empty schedule");
    cfg.validate();
    PipelineResult out;
    SimStats& st = out.stats;
    for (const FrameTask& task : tasks) {
        StageTimes times;
        const SimStats fc = simulate_fc_detection(task.covis_blocks, cfg);
        st += fc;
        times.tracking += fc.total_cycles;
        if (task.coarse) {
            times.tracking += simulate_coarse_estimator(task.coarse_macs, cfg);
            st.ops.mac += task.coarse_macs;
        }
        if (task.align_macs > 0) {
            const SimStats fw =
                simulate_render_job(task.align_render, cfg, cfg.tracking_gpe_groups, scheduler_on, false, false);
            st += fw;
            times.tracking += fw.total_cycles + simulate_coarse_estimator(task.align_macs, cfg);
            st.ops.mac += task.align_macs;
        }
        if (task.refine_iters > 0) {
            const SimStats it =
                simulate_render_job(task.track_render, cfg, cfg.tracking_gpe_groups, scheduler_on, true, false);
            for (int i = 0; i < task.refine_iters; ++i) st += it;
            times.tracking += it.total_cycles * static_cast<std::uint64_t>(task.refine_iters);
        }
        if (task.map_passes > 0) {
            const SimStats it = simulate_render_job(task.map_render, cfg, cfg.num_gpe_groups, scheduler_on, true, true);
            for (int i = 0; i < task.map_passes; ++i) st += it;
            times.mapping += it.total_cycles * static_cast<std::uint64_t>(task.map_passes);
        }
        if (task.log_contributions) {
            const LoggingResult lg = simulate_logging(task.map_render.tile_deltas, cfg);
            st += lg.stats;
            times.mapping += lg.stats.total_cycles;
        }
        if (task.skip_records > 0) {
            const SimStats sk = skipping_cost(task.skip_records, cfg);
            st += sk;
            times.mapping += sk.total_cycles;
        }
        out.frames.push_back(times);
    }
    out.pipelined = pipelined_makespan(out.frames);
    out.serialized = serialized_makespan(out.frames);
    st.tracking_cycles = 0;
    st.mapping_cycles = 0;
    for (const StageTimes& f : out.frames) {
        st.tracking_cycles += f.tracking;
        st.mapping_cycles += f.mapping;
    }
    st.total_cycles = pipelined ? out.pipelined : out.serialized;
    return out;
}

}  // namespace ags::sim
