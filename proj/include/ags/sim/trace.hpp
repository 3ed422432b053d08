#pragma once

#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "ags/sim/workload.hpp"

namespace ags::sim {

// JSON-lines schedule: a header line {"type":"ags-trace","version":1}
// followed by one {"type":"frame",...} object per FrameTask.
void write_trace(std::ostream& os, const std::vector<FrameTask>& tasks);

// Throws std::runtime_error on a malformed stream.
std::vector<FrameTask> read_trace(std::istream& is);

nlohmann::ordered_json to_json(const FrameTask& task);
FrameTask frame_task_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const SimStats& stats, const HardwareConfig& cfg);
// Inverse of to_json; derived fields are ignored and per_gpe is left empty.
SimStats sim_stats_from_json(const nlohmann::json& j);

}  // namespace ags::sim
