#include "ags/sim/stats.hpp"

namespace ags::sim {

OpCounts& OpCounts::operator+=(const OpCounts& o) {
    alpha += o.alpha;
    alpha_hits += o.alpha_hits;
    blend += o.blend;
    grad += o.grad;
    mac += o.mac;
    add += o.add;
    compare += o.compare;
    return *this;
}

GpeCycles& GpeCycles::operator+=(const GpeCycles& o) {
    busy += o.busy;
    idle += o.idle;
    assist += o.assist;
    return *this;
}

double SimStats::utilization() const {
    const std::uint64_t t = gpe.total();
    return t == 0 ? 0.0 : static_cast<double>(gpe.busy + gpe.assist) / static_cast<double>(t);
}

double SimStats::energy(const EnergyWeights& w) const {
    return w.alpha * static_cast<double>(ops.alpha) + w.blend * static_cast<double>(ops.blend) +
           w.grad * static_cast<double>(ops.grad) + w.mac * static_cast<double>(ops.mac) +
           w.add * static_cast<double>(ops.add) + w.compare * static_cast<double>(ops.compare) +
           w.dram_byte * static_cast<double>(dram_read_bytes + dram_write_bytes);
}

SimStats& SimStats::operator+=(const SimStats& o) {
    total_cycles += o.total_cycles;
    fc_cycles += o.fc_cycles;
    tracking_cycles += o.tracking_cycles;
    mapping_cycles += o.mapping_cycles;
    gpe += o.gpe;
    ops += o.ops;
    dram_read_bytes += o.dram_read_bytes;
    dram_write_bytes += o.dram_write_bytes;
    return *this;
}

}  // namespace ags::sim
