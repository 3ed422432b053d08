#include "ags/sim/trace.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ags::sim {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json work_json(const RenderWork& w) {
    ordered_json j;
    j["table_entries"] = w.table_entries;
    j["gaussians"] = w.gaussians;
    j["groups"] = w.groups;
    ordered_json deltas = ordered_json::array();
    for (const TileDeltas& t : w.tile_deltas) {
        ordered_json tile = ordered_json::array();
        for (const auto& [id, d] : t) tile.push_back({id, d});
        deltas.push_back(std::move(tile));
    }
    j["tile_deltas"] = std::move(deltas);
    return j;
}

RenderWork work_from_json(const nlohmann::json& j) {
    RenderWork w;
    w.table_entries = j.at("table_entries").get<std::uint64_t>();
    w.gaussians = j.at("gaussians").get<std::uint64_t>();
    w.groups = j.at("groups").get<std::vector<std::vector<std::uint32_t>>>();
    for (const auto& tile : j.at("tile_deltas")) {
        TileDeltas t;
        for (const auto& e : tile) t.emplace_back(e.at(0).get<int>(), e.at(1).get<std::uint32_t>());
        w.tile_deltas.push_back(std::move(t));
    }
    return w;
}

}  // namespace

ordered_json to_json(const FrameTask& t) {
    ordered_json j;
    j["type"] = "frame";
    j["frame"] = t.frame;
    j["covis_blocks"] = t.covis_blocks;
    j["coarse"] = t.coarse;
    j["coarse_macs"] = t.coarse_macs;
    j["refine_iters"] = t.refine_iters;
    j["track_render"] = work_json(t.track_render);
    j["align_macs"] = t.align_macs;
    j["align_render"] = work_json(t.align_render);
    j["map_passes"] = t.map_passes;
    j["map_render"] = work_json(t.map_render);
    j["log_contributions"] = t.log_contributions;
    j["skip_records"] = t.skip_records;
    return j;
}

FrameTask frame_task_from_json(const nlohmann::json& j) {
    FrameTask t;
    t.frame = j.at("frame").get<int>();
    t.covis_blocks = j.at("covis_blocks").get<std::uint32_t>();
    t.coarse = j.at("coarse").get<bool>();
    t.coarse_macs = j.at("coarse_macs").get<std::uint64_t>();
    t.refine_iters = j.at("refine_iters").get<int>();
    t.track_render = work_from_json(j.at("track_render"));
    t.align_macs = j.value("align_macs", std::uint64_t{0});
    if (j.contains("align_render")) t.align_render = work_from_json(j.at("align_render"));
    t.map_passes = j.at("map_passes").get<int>();
    t.map_render = work_from_json(j.at("map_render"));
    t.log_contributions = j.at("log_contributions").get<bool>();
    t.skip_records = j.at("skip_records").get<std::uint64_t>();
    return t;
}

void write_trace(std::ostream& os, const std::vector<FrameTask>& tasks) {
    ordered_json header;
    header["type"] = "ags-trace";
    header["version"] = 1;
    os << header.dump() << '\n';
    for (const FrameTask& t : tasks) os << to_json(t).dump() << '\n';
}

std::vector<FrameTask> read_trace(std::istream& is) {
    std::vector<FrameTask> out;
    std::string line;
    bool header = false;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (!header) {
                if (type != "ags-trace" || j.at("version").get<int>() != 1) {
                    throw std::runtime_error("missing ags-trace v1 header");
                }
                header = true;
            } else if (type == "frame") {
                out.push_back(frame_task_from_json(j));
            } else {
                throw std::runtime_error("unknown record type '" + type + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!header) throw std::runtime_error("trace: empty stream");
    return out;
}

ordered_json to_json(const SimStats& s, const HardwareConfig& cfg) {
    ordered_json j;
    j["preset"] = cfg.name;
    j["total_cycles"] = s.total_cycles;
    j["fc_cycles"] = s.fc_cycles;
    j["tracking_cycles"] = s.tracking_cycles;
    j["mapping_cycles"] = s.mapping_cycles;
    j["gpe_busy"] = s.gpe.busy;
    j["gpe_idle"] = s.gpe.idle;
    j["gpe_assist"] = s.gpe.assist;
    j["utilization"] = s.utilization();
    j["ops"] = {{"alpha", s.ops.alpha}, {"alpha_hits", s.ops.alpha_hits}, {"blend", s.ops.blend},
                {"grad", s.ops.grad},   {"mac", s.ops.mac},               {"add", s.ops.add},
                {"compare", s.ops.compare}};
    j["dram_read_bytes"] = s.dram_read_bytes;
    j["dram_write_bytes"] = s.dram_write_bytes;
    j["energy"] = s.energy(cfg.energy);
    j["seconds"] = static_cast<double>(s.total_cycles) / (cfg.clock_mhz * 1e6);
    return j;
}

SimStats sim_stats_from_json(const nlohmann::json& j) {
    SimStats s;
    s.total_cycles = j.at("total_cycles").get<std::uint64_t>();
    s.fc_cycles = j.at("fc_cycles").get<std::uint64_t>();
    s.tracking_cycles = j.at("tracking_cycles").get<std::uint64_t>();
    s.mapping_cycles = j.at("mapping_cycles").get<std::uint64_t>();
    s.gpe.busy = j.at("gpe_busy").get<std::uint64_t>();
    s.gpe.idle = j.at("gpe_idle").get<std::uint64_t>();
    s.gpe.assist = j.at("gpe_assist").get<std::uint64_t>();
    const nlohmann::json& ops = j.at("ops");
    s.ops.alpha = ops.at("alpha").get<std::uint64_t>();
    s.ops.alpha_hits = ops.at("alpha_hits").get<std::uint64_t>();
    s.ops.blend = ops.at("blend").get<std::uint64_t>();
    s.ops.grad = ops.at("grad").get<std::uint64_t>();
    s.ops.mac = ops.at("mac").get<std::uint64_t>();
    s.ops.add = ops.at("add").get<std::uint64_t>();
    s.ops.compare = ops.at("compare").get<std::uint64_t>();
    s.dram_read_bytes = j.at("dram_read_bytes").get<std::uint64_t>();
    s.dram_write_bytes = j.at("dram_write_bytes").get<std::uint64_t>();
    return s;
}

}  // namespace ags::sim
