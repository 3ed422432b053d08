#pragma once

#include <cstdint>
#include <string>

namespace ags::sim {

// Per-operation energy proxy weights (arbitrary units).
struct EnergyWeights {
    double alpha = 4.0;
    double blend = 1.0;
    double grad = 6.0;
    double mac = 0.5;
    double add = 0.1;
    double compare = 0.1;
    double dram_byte = 20.0;
};

struct HardwareConfig {
    std::string name = "edge";
    int num_gpe_groups = 16;        // mapping engine GS array, groups of 4x4 GPEs
    int tracking_gpe_groups = 8;    // lightweight GS array of the tracking engine
    int systolic_macs = 2 * 32 * 32;
    int systolic_overhead = 64;     // fill/drain cycles per coarse estimate
    int gauss_buffer_bytes = 64 * 1024;
    int logging_table_bytes = 4 * 1024;
    int skipping_table_bytes = 4 * 1024;
    double clock_mhz = 500.0;
    double dram_bytes_per_cycle = 51.2;  // LPDDR4-3200 at 500 MHz
    int dram_latency = 100;
    int c_alpha = 4;
    int c_blend = 1;
    int c_grad = 6;
    int alpha_buffer_entries = 8;  // per target GPE
    int hot_window_tiles = 16;
    int hot_threshold = 2;
    int record_bytes = 8;     // 4-byte id + 4-byte count
    int gaussian_bytes = 48;  // one Gaussian's parameters as fetched per table entry
    int sad_bytes = 4;
    int fc_adders = 8;
    int fc_comparators = 2;
    EnergyWeights energy;

    // Throws std::invalid_argument naming the first non-positive field.
    void validate() const;
    bool operator==(const HardwareConfig&) const = default;
};

HardwareConfig edge_preset();
HardwareConfig server_preset();

// "edge" or "server"; throws std::invalid_argument otherwise.
HardwareConfig preset(const std::string& name);

}  // namespace ags::sim
