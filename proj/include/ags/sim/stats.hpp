#pragma once

#include <cstdint>
#include <vector>

#include "ags/sim/hardware.hpp"

namespace ags::sim {

struct OpCounts {
    std::uint64_t alpha = 0;
    std::uint64_t alpha_hits = 0;  // alphas consumed from the alpha buffer
    std::uint64_t blend = 0;
    std::uint64_t grad = 0;
    std::uint64_t mac = 0;
    std::uint64_t add = 0;
    std::uint64_t compare = 0;

    OpCounts& operator+=(const OpCounts& o);
    bool operator==(const OpCounts&) const = default;
};

struct GpeCycles {
    std::uint64_t busy = 0;
    std::uint64_t idle = 0;
    std::uint64_t assist = 0;

    std::uint64_t total() const { return busy + idle + assist; }
    GpeCycles& operator+=(const GpeCycles& o);
    bool operator==(const GpeCycles&) const = default;
};

struct SimStats {
    std::uint64_t total_cycles = 0;
    std::uint64_t fc_cycles = 0;
    std::uint64_t tracking_cycles = 0;  // busy time of the pose tracking engine
    std::uint64_t mapping_cycles = 0;   // busy time of the mapping engine
    std::vector<GpeCycles> per_gpe;     // filled by single-group simulations
    GpeCycles gpe;                      // summed over every simulated GPE
    OpCounts ops;
    std::uint64_t dram_read_bytes = 0;
    std::uint64_t dram_write_bytes = 0;

    // (busy + assist) / (busy + idle + assist) over all simulated GPEs.
    double utilization() const;
    double energy(const EnergyWeights& w) const;

    // Adds counters; cycle totals are summed as well.
    SimStats& operator+=(const SimStats& o);
    bool operator==(const SimStats&) const = default;
};

}  // namespace ags::sim
