#include "ags/sim/gpe.hpp"

#include <limits>
#include <stdexcept>

namespace ags::sim {

namespace {

constexpr std::int64_t kUnclaimed = -1;
constexpr std::int64_t kInFlight = std::numeric_limits<std::int64_t>::max();

enum class Phase { kIdle, kAlpha, kBlend };

struct Gpe {
    int n = 0;
    int k = 0;  // entry in progress (or next to start)
    Phase phase = Phase::kIdle;
    int left = 0;
    // assistant side
    int target = -1;
    int claimed = -1;
    int assist_left = 0;
    // target side
    std::vector<std::int64_t> ready_at;  // per entry: kUnclaimed, kInFlight or first usable cycle
    int next_claim = 0;
    int outstanding = 0;  // claimed entries not yet consumed
};

int claimable(const Gpe& g) {
    int c = std::max(g.next_claim, g.k + 2);
    while (c < g.n && g.ready_at[c] != kUnclaimed) ++c;
    return c < g.n ? c : -1;
}

}  // namespace

TileSimResult simulate_tile_render(const GroupTrace& trace, const HardwareConfig& cfg, bool scheduler_on) {
    const int m = static_cast<int>(trace.pixels.size());
    if (m > kGroupSize) throw std::invalid_argument("simulate_tile_render: more pixels than GPEs in a group");
    TileSimResult out;
    out.pixels.assign(m, PixelOutput{});
    out.stats.per_gpe.assign(m, GpeCycles{});
    std::vector<Gpe> gpes(m);
    for (int i = 0; i < m; ++i) {
        gpes[i].n = static_cast<int>(trace.pixels[i].size());
        gpes[i].ready_at.assign(gpes[i].n, kUnclaimed);
    }
    auto pending = [&] {
        for (const Gpe& g : gpes) {
            if (g.k < g.n) return true;
        }
        return false;
    };

    std::int64_t t = 0;
    OpCounts& ops = out.stats.ops;
    while (pending()) {
        for (int i = 0; i < m; ++i) {
            Gpe& g = gpes[i];
            GpeCycles& cyc = out.stats.per_gpe[i];
            if (g.k < g.n) {
                if (g.phase == Phase::kIdle) {
                    const std::int64_t r = g.ready_at[g.k];
                    if (r == kUnclaimed) {
                        g.phase = Phase::kAlpha;
                        g.left = cfg.c_alpha;
                    } else if (r <= t) {
                        --g.outstanding;
                        ++ops.alpha_hits;
                        g.phase = Phase::kBlend;
                        g.left = cfg.c_blend;
                    } else {
                        ++cyc.idle;  // waiting on an assistant's alpha
                        continue;
                    }
                }
                ++cyc.busy;
                if (--g.left > 0) continue;
                if (g.phase == Phase::kAlpha) {
                    ++ops.alpha;
                    g.phase = Phase::kBlend;
                    g.left = cfg.c_blend;
                    continue;
                }
                const EvalItem& it = trace.pixels[i][g.k];
                PixelOutput& px = out.pixels[i];
                const double w = px.transmittance * it.alpha;
                px.color += w * it.color;
                px.depth += w * it.depth;
                px.transmittance *= (1.0 - it.alpha);
                ++ops.blend;
                g.phase = Phase::kIdle;
                ++g.k;
                continue;
            }
            if (!scheduler_on) {
                ++cyc.idle;
                continue;
            }
            if (g.target < 0) {
                int best = -1, best_remaining = 0, best_entry = -1;
                for (int j = 0; j < m; ++j) {
                    if (j == i) continue;
                    const Gpe& o = gpes[j];
                    if (o.k >= o.n || o.outstanding >= cfg.alpha_buffer_entries) continue;
                    const int c = claimable(o);
                    if (c < 0) continue;
                    if (o.n - o.k > best_remaining) {
                        best = j;
                        best_remaining = o.n - o.k;
                        best_entry = c;
                    }
                }
                if (best >= 0) {
                    Gpe& o = gpes[best];
                    o.ready_at[best_entry] = kInFlight;
                    o.next_claim = best_entry + 1;
                    ++o.outstanding;
                    g.target = best;
                    g.claimed = best_entry;
                    g.assist_left = cfg.c_alpha;
                }
            }
            if (g.target < 0) {
                ++cyc.idle;
                continue;
            }
            ++cyc.assist;
            if (--g.assist_left == 0) {
                gpes[g.target].ready_at[g.claimed] = t + 1;
                ++ops.alpha;
                g.target = -1;
            }
        }
        ++t;
    }
    out.stats.total_cycles = static_cast<std::uint64_t>(t);
    for (const GpeCycles& c : out.stats.per_gpe) out.stats.gpe += c;
    return out;
}

SimStats simulate_group_counts(const std::vector<std::uint32_t>& counts, const HardwareConfig& cfg,
                               bool scheduler_on) {
    GroupTrace trace;
    trace.pixels.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) trace.pixels[i].resize(counts[i]);
    return simulate_tile_render(trace, cfg, scheduler_on).stats;
}

}  // namespace ags::sim
