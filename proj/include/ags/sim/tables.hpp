#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "ags/sim/stats.hpp"

namespace ags::sim {

// Contribution-count increments produced by one tile: (gaussian id, number
// of sub-threshold alphas in this tile), one entry per evaluated Gaussian.
using TileDeltas = std::vector<std::pair<int, std::uint32_t>>;

struct LoggingResult {
    SimStats stats;
    std::map<int, std::uint32_t> counts;  // DRAM-resident record after all windows
    std::map<int, std::uint32_t> writes;  // record writes per Gaussian
    std::set<int> hot;                    // Gaussians ever held in the on-chip buffer
    std::uint64_t naive_write_bytes = 0;  // per-tile read-modify-write of every entry
    std::uint64_t naive_read_bytes = 0;
};

// Tiles are consumed in windows of cfg.hot_window_tiles. A Gaussian seen in
// at least cfg.hot_threshold tiles of a window is hot: it is read once,
// accumulated in the logging buffer and written back once when the window
// closes. Everything else is cold and pays a read-modify-write per tile
// occurrence. Hot Gaussians beyond the buffer capacity are demoted to cold.
LoggingResult simulate_logging(const std::vector<TileDeltas>& tiles, const HardwareConfig& cfg);

struct SkippingResult {
    std::set<int> skip;
    SimStats stats;
};

// Cost of streaming `records` entries through the skipping table.
SimStats skipping_cost(std::uint64_t records, const HardwareConfig& cfg);

// Streams the record through the skipping table, one comparison per entry;
// entries with count > thresh_n lose their valid flag.
SkippingResult simulate_skipping(const std::map<int, std::uint32_t>& record, std::int64_t thresh_n,
                                 const HardwareConfig& cfg);

// Cycles to move `bytes` in `requests` bursts: latency per burst plus the
// bandwidth-limited transfer time.
std::uint64_t dram_cycles(std::uint64_t bytes, std::uint64_t requests, const HardwareConfig& cfg);

}  // namespace ags::sim
