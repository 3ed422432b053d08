#pragma once

#include <filesystem>
#include <string>

#include "ags/harness/experiment.hpp"

namespace ags::harness {

// Per-frame table, one header line plus one line per row. Optional values
// are empty fields; infinite PSNR is written as "inf".
std::string frames_csv(const ModeReport& mode);
std::vector<FrameRow> parse_frames_csv(const std::string& text);

// Aggregate JSON with stable key order.
std::string report_json(const RunReport& report);

// Writes report.json and <mode>_frames.csv into `dir` (created if needed).
void emit_report(const RunReport& report, const std::filesystem::path& dir);

// Reads a directory written by emit_report. Aggregates are recomputed from
// the frame tables; simulator counters and energy come from the JSON.
RunReport parse_report(const std::filesystem::path& dir);

}  // namespace ags::harness
