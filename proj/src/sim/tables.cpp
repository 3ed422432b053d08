#include "ags/sim/tables.hpp"

#include <algorithm>
#include <cmath>

namespace ags::sim {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

std::uint64_t dram_cycles(std::uint64_t bytes, std::uint64_t requests, const HardwareConfig& cfg) {
    if (bytes == 0) return 0;
    const auto transfer = static_cast<std::uint64_t>(std::ceil(static_cast<double>(bytes) / cfg.dram_bytes_per_cycle));
    return transfer + requests * static_cast<std::uint64_t>(cfg.dram_latency);
}

LoggingResult simulate_logging(const std::vector<TileDeltas>& tiles, const HardwareConfig& cfg) {
    LoggingResult out;
    const std::uint64_t rb = static_cast<std::uint64_t>(cfg.record_bytes);
    const std::size_t capacity = static_cast<std::size_t>(cfg.logging_table_bytes / cfg.record_bytes);
    const std::size_t window = static_cast<std::size_t>(cfg.hot_window_tiles);
    std::uint64_t requests = 0;

    for (std::size_t w0 = 0; w0 < tiles.size(); w0 += window) {
        const std::size_t w1 = std::min(tiles.size(), w0 + window);
        // Occurrence counts and first-appearance order within the window.
        std::map<int, int> occurrences;
        std::vector<int> order;
        for (std::size_t t = w0; t < w1; ++t) {
            for (const auto& [id, delta] : tiles[t]) {
                if (occurrences[id]++ == 0) order.push_back(id);
            }
        }
        std::map<int, std::uint32_t> buffer;  // resident hot entries
        for (int id : order) {
            if (occurrences[id] >= cfg.hot_threshold && buffer.size() < capacity) buffer.emplace(id, 0);
        }
        // Prefetch of hot entries.
        for (auto& [id, value] : buffer) {
            value = out.counts[id];
            out.hot.insert(id);
            out.stats.dram_read_bytes += rb;
            ++requests;
        }
        for (std::size_t t = w0; t < w1; ++t) {
            for (const auto& [id, delta] : tiles[t]) {
                out.naive_read_bytes += rb;
                out.naive_write_bytes += rb;
                ++out.stats.ops.add;
                auto it = buffer.find(id);
                if (it != buffer.end()) {
                    it->second += delta;
                    continue;
                }
                out.counts[id] += delta;
                ++out.writes[id];
                out.stats.dram_read_bytes += rb;
                out.stats.dram_write_bytes += rb;
                requests += 2;
            }
        }
        for (const auto& [id, value] : buffer) {
            out.counts[id] = value;
            ++out.writes[id];
            out.stats.dram_write_bytes += rb;
            ++requests;
        }
    }
    const std::uint64_t update_cycles = ceil_div(out.stats.ops.add, static_cast<std::uint64_t>(cfg.num_gpe_groups));
    const std::uint64_t mem = dram_cycles(out.stats.dram_read_bytes + out.stats.dram_write_bytes, requests, cfg);
    out.stats.total_cycles = std::max(update_cycles, mem);
    out.stats.mapping_cycles = out.stats.total_cycles;
    return out;
}

SimStats skipping_cost(std::uint64_t records, const HardwareConfig& cfg) {
    SimStats out;
    if (records == 0) return out;
    out.ops.compare = records;
    out.dram_read_bytes = records * static_cast<std::uint64_t>(cfg.record_bytes);
    const std::uint64_t per_fill = static_cast<std::uint64_t>(cfg.skipping_table_bytes / cfg.record_bytes);
    const std::uint64_t mem = dram_cycles(out.dram_read_bytes, ceil_div(records, per_fill), cfg);
    out.total_cycles = std::max(mem, ceil_div(records, static_cast<std::uint64_t>(cfg.num_gpe_groups)));
    return out;
}

SkippingResult simulate_skipping(const std::map<int, std::uint32_t>& record, std::int64_t thresh_n,
                                 const HardwareConfig& cfg) {
    SkippingResult out;
    // Valid flags start at 1; the comparison unit clears them.
    for (const auto& [id, count] : record) {
        if (static_cast<std::int64_t>(count) > thresh_n) out.skip.insert(id);
    }
    out.stats = skipping_cost(record.size(), cfg);
    out.stats.mapping_cycles = out.stats.total_cycles;
    return out;
}

}  // namespace ags::sim
