#include "ags/sim/hardware.hpp"

#include <stdexcept>

namespace ags::sim {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("hardware config: ") + name + " must be positive");
}

}  // namespace

void HardwareConfig::validate() const {
    require_positive(num_gpe_groups, "num_gpe_groups");
    require_positive(tracking_gpe_groups, "tracking_gpe_groups");
    require_positive(systolic_macs, "systolic_macs");
    require_positive(systolic_overhead, "systolic_overhead");
    require_positive(gauss_buffer_bytes, "gauss_buffer_bytes");
    require_positive(logging_table_bytes, "logging_table_bytes");
    require_positive(skipping_table_bytes, "skipping_table_bytes");
    require_positive(clock_mhz, "clock_mhz");
    require_positive(dram_bytes_per_cycle, "dram_bytes_per_cycle");
    require_positive(dram_latency, "dram_latency");
    require_positive(c_alpha, "c_alpha");
    require_positive(c_blend, "c_blend");
    require_positive(c_grad, "c_grad");
    require_positive(alpha_buffer_entries, "alpha_buffer_entries");
    require_positive(hot_window_tiles, "hot_window_tiles");
    require_positive(hot_threshold, "hot_threshold");
    require_positive(record_bytes, "record_bytes");
    require_positive(gaussian_bytes, "gaussian_bytes");
    require_positive(sad_bytes, "sad_bytes");
    require_positive(fc_adders, "fc_adders");
    require_positive(fc_comparators, "fc_comparators");
    require_positive(energy.alpha, "energy.alpha");
    require_positive(energy.blend, "energy.blend");
    require_positive(energy.grad, "energy.grad");
    require_positive(energy.mac, "energy.mac");
    require_positive(energy.add, "energy.add");
    require_positive(energy.compare, "energy.compare");
    require_positive(energy.dram_byte, "energy.dram_byte");
}

HardwareConfig edge_preset() { return HardwareConfig{}; }

HardwareConfig server_preset() {
    HardwareConfig c;
    c.name = "server";
    c.num_gpe_groups = 32;
    c.tracking_gpe_groups = 16;
    c.systolic_macs = 4 * 32 * 32;
    c.gauss_buffer_bytes = 128 * 1024;
    c.logging_table_bytes = 8 * 1024;
    c.skipping_table_bytes = 8 * 1024;
    c.dram_bytes_per_cycle = 512.0;  // HBM2 at 500 MHz
    c.dram_latency = 80;
    return c;
}

HardwareConfig preset(const std::string& name) {
    if (name == "edge") return edge_preset();
    if (name == "server") return server_preset();
    throw std::invalid_argument("unknown hardware preset '" + name + "' (expected edge or server)");
}

}  // namespace ags::sim
