#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ags/common/rng.hpp"
#include "ags/harness/capture.hpp"
#include "ags/mapping/mapping.hpp"
#include "ags/sim/trace.hpp"
#include "support/scenes.hpp"

using namespace ags;
using namespace ags::sim;

namespace {

HardwareConfig fig12_config() {
    HardwareConfig c = edge_preset();
    c.c_alpha = 4;
    c.c_blend = 1;
    return c;
}

GroupTrace counts_trace(const std::vector<std::uint32_t>& counts, Rng* rng = nullptr) {
    GroupTrace t;
    int id = 0;
    for (std::uint32_t n : counts) {
        std::vector<EvalItem> items;
        for (std::uint32_t k = 0; k < n; ++k) {
            EvalItem e;
            e.gaussian_id = id++;
            if (rng != nullptr) {
                e.alpha = rng->uniform(0.0, 0.99);
                e.color = Vec3(rng->uniform(), rng->uniform(), rng->uniform());
                e.depth = rng->uniform(1.0, 5.0);
            }
            items.push_back(e);
        }
        t.pixels.push_back(std::move(items));
    }
    return t;
}

std::vector<std::uint32_t> random_counts(Rng& rng, int pixels, int max_count) {
    std::vector<std::uint32_t> c(pixels);
    for (auto& v : c) v = static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(max_count) + 1));
    return c;
}

}  // namespace

TEST(GpeScheduler, Fig12IdleFractionWithoutScheduler) {
    const SimStats s = simulate_group_counts({2, 6}, fig12_config(), false);
    EXPECT_EQ(s.total_cycles, 30u);
    EXPECT_EQ(s.per_gpe[0].busy, 10u);
    EXPECT_EQ(s.per_gpe[0].idle, 20u);
    EXPECT_DOUBLE_EQ(static_cast<double>(s.per_gpe[0].idle) / s.total_cycles, 2.0 / 3.0);
}

TEST(GpeScheduler, Fig12AssistantPrecomputesTheTail) {
    const SimStats s = simulate_group_counts({2, 6}, fig12_config(), true);
    // Hand schedule: GPE1 frees up at cycle 10 and precomputes entries 4 and
    // 5 of GPE2 (ready at 14 and 18); GPE2 blends them at cycles 20 and 21.
    EXPECT_EQ(s.total_cycles, 22u);
    EXPECT_EQ(s.ops.alpha_hits, 2u);
    EXPECT_EQ(s.per_gpe[0].assist, 8u);
    EXPECT_EQ(s.per_gpe[1].busy, 4u * 5u + 2u * 1u);
}

TEST(GpeScheduler, Fig12WithIdleNeighbours) {
    std::vector<std::uint32_t> counts(16, 0);
    counts[0] = 2;
    counts[1] = 6;
    const SimStats off = simulate_group_counts(counts, fig12_config(), false);
    const SimStats on = simulate_group_counts(counts, fig12_config(), true);
    EXPECT_EQ(off.total_cycles, 30u);
    EXPECT_LT(on.total_cycles, 30u);
}

TEST(GpeScheduler, UniformWorkloadGainsNothing) {
    const std::vector<std::uint32_t> counts(16, 7);
    const auto cfg = edge_preset();
    EXPECT_EQ(simulate_group_counts(counts, cfg, true).total_cycles,
              simulate_group_counts(counts, cfg, false).total_cycles);
}

TEST(GpeScheduler, RejectsOversizedGroups) {
    EXPECT_THROW(simulate_group_counts(std::vector<std::uint32_t>(17, 1), edge_preset(), false),
                 std::invalid_argument);
}

TEST(GpeScheduler, CycleAccountingPerGpe) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        for (bool on : {false, true}) {
            const SimStats s = simulate_group_counts(random_counts(rng, 16, 20), edge_preset(), on);
            for (const GpeCycles& g : s.per_gpe) EXPECT_EQ(g.total(), s.total_cycles);
        }
    }
}

TEST(GpeScheduler, OutputsIdenticalWithAndWithoutScheduler) {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const GroupTrace t = counts_trace(random_counts(rng, 16, 12), &rng);
        const TileSimResult off = simulate_tile_render(t, edge_preset(), false);
        const TileSimResult on = simulate_tile_render(t, edge_preset(), true);
        ASSERT_EQ(off.pixels.size(), on.pixels.size());
        for (std::size_t i = 0; i < on.pixels.size(); ++i) {
            EXPECT_EQ(off.pixels[i].color, on.pixels[i].color);
            EXPECT_EQ(off.pixels[i].depth, on.pixels[i].depth);
            EXPECT_EQ(off.pixels[i].transmittance, on.pixels[i].transmittance);
        }
        EXPECT_EQ(off.stats.ops.alpha, on.stats.ops.alpha);
        EXPECT_EQ(off.stats.ops.blend, on.stats.ops.blend);
    }
}

TEST(GpeScheduler, MatchesFunctionalRenderer) {
    Rng rng(21);
    const auto intr = oracle::small_camera(32, 32);
    for (int trial = 0; trial < 5; ++trial) {
        const splat::Scene scene = oracle::random_scene(rng, 40, intr);
        const splat::RenderResult r = splat::render_frame(scene, Pose{}, intr);
        const auto groups = harness::pixel_groups(r);
        const auto traces = harness::group_traces(r);
        ASSERT_EQ(groups.size(), traces.size());
        for (bool on : {false, true}) {
            for (std::size_t g = 0; g < traces.size(); ++g) {
                const TileSimResult sim = simulate_tile_render(traces[g], edge_preset(), on);
                const splat::TileRect& rect = r.aux.tiles[groups[g].tile].rect;
                for (std::size_t p = 0; p < groups[g].local.size(); ++p) {
                    const int local = groups[g].local[p];
                    const int x = rect.x0 + local % rect.width();
                    const int y = rect.y0 + local / rect.width();
                    ASSERT_EQ(sim.pixels[p].color, r.color(x, y));
                    ASSERT_EQ(sim.pixels[p].depth, r.depth(x, y));
                }
            }
        }
    }
}

TEST(GpeScheduler, NeverSlowerOnRandomTraces) {
    Rng rng(1234);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        HardwareConfig cfg = edge_preset();
        cfg.c_alpha = 1 + static_cast<int>(rng.below(8));
        cfg.c_blend = 1 + static_cast<int>(rng.below(3));
        cfg.alpha_buffer_entries = 1 + static_cast<int>(rng.below(8));
        const auto counts = random_counts(rng, 1 + static_cast<int>(rng.below(16)), 30);
        const SimStats off = simulate_group_counts(counts, cfg, false);
        const SimStats on = simulate_group_counts(counts, cfg, true);
        if (on.total_cycles > off.total_cycles) ++violations;
        const bool uneven = std::adjacent_find(counts.begin(), counts.end(), std::not_equal_to<>()) != counts.end();
        if (uneven) {
            EXPECT_GE(on.utilization(), off.utilization());
        }
    }
    EXPECT_EQ(violations, 0);
}

TEST(LoggingTable, Fig10HotGaussiansWrittenOnce) {
    // Tile 1 holds GS1..GS3, tile 2 holds GS1, GS3, GS4.
    const std::vector<TileDeltas> tiles = {{{1, 2}, {2, 1}, {3, 4}}, {{1, 1}, {3, 0}, {4, 5}}};
    const LoggingResult r = simulate_logging(tiles, edge_preset());
    EXPECT_EQ(r.writes.at(1), 1u);
    EXPECT_EQ(r.writes.at(3), 1u);
    EXPECT_EQ(r.writes.at(2), 1u);
    EXPECT_EQ(r.writes.at(4), 1u);
    EXPECT_EQ(r.hot, (std::set<int>{1, 3}));
    // The naive scheme writes GS1 and GS3 once per tile: 6 writes in total.
    EXPECT_EQ(r.naive_write_bytes, 6u * 8u);
    EXPECT_EQ(r.stats.dram_write_bytes, 4u * 8u);
    EXPECT_EQ(r.counts, (std::map<int, std::uint32_t>{{1, 3}, {2, 1}, {3, 4}, {4, 5}}));
}

TEST(LoggingTable, NoSharedGaussiansMatchesNaive) {
    std::vector<TileDeltas> tiles;
    for (int t = 0; t < 16; ++t) tiles.push_back({{2 * t, 1}, {2 * t + 1, 3}});
    const LoggingResult r = simulate_logging(tiles, edge_preset());
    EXPECT_TRUE(r.hot.empty());
    EXPECT_EQ(r.stats.dram_write_bytes, r.naive_write_bytes);
}

TEST(LoggingTable, RandomWindowsKeepCountsAndSaveWrites) {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<TileDeltas> tiles(16 * (1 + rng.below(3)));
        std::map<int, std::uint32_t> oracle;
        bool shared = false;
        std::vector<std::map<int, int>> seen((tiles.size() + 15) / 16);
        for (std::size_t t = 0; t < tiles.size(); ++t) {
            std::set<int> ids;
            const int n = 1 + static_cast<int>(rng.below(30));
            for (int k = 0; k < n; ++k) ids.insert(static_cast<int>(rng.below(200)));
            for (int id : ids) {
                const auto d = static_cast<std::uint32_t>(rng.below(10));
                tiles[t].emplace_back(id, d);
                oracle[id] += d;
                if (++seen[t / 16][id] >= 2) shared = true;
            }
        }
        HardwareConfig cfg = edge_preset();
        if (trial % 2) cfg.logging_table_bytes = 8 * 4;  // force demotion to cold
        const LoggingResult r = simulate_logging(tiles, cfg);
        EXPECT_EQ(r.counts, oracle);
        EXPECT_LE(r.stats.dram_write_bytes, r.naive_write_bytes);
        if (shared) {
            EXPECT_LT(r.stats.dram_write_bytes, r.naive_write_bytes);
        }
    }
}

TEST(SkippingTable, Fig11InvalidatesGs3AndGs4) {
    const std::map<int, std::uint32_t> record = {{1, 10}, {2, 20}, {3, 50}, {4, 40}};
    const SkippingResult r = simulate_skipping(record, 35, edge_preset());
    EXPECT_EQ(r.skip, (std::set<int>{3, 4}));
    EXPECT_EQ(r.stats.ops.compare, 4u);
    EXPECT_EQ(r.stats.dram_read_bytes, 4u * 8u);
}

TEST(SkippingTable, EmptyRecord) {
    const SkippingResult r = simulate_skipping({}, 9, edge_preset());
    EXPECT_TRUE(r.skip.empty());
    EXPECT_EQ(r.stats.ops.compare, 0u);
}

TEST(SkippingTable, MatchesFunctionalSkipSet) {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        mapping::ContributionRecord rec;
        const int n = static_cast<int>(rng.below(300));
        for (int k = 0; k < n; ++k) rec.counts[static_cast<int>(rng.below(1000))] = static_cast<std::uint32_t>(rng.below(60));
        const int thresh = static_cast<int>(rng.below(60));
        EXPECT_EQ(simulate_skipping(rec.counts, thresh, edge_preset()).skip, mapping::build_skip_set(rec, thresh));
    }
}

TEST(CoarseEstimator, Throughput) {
    EXPECT_EQ(simulate_coarse_estimator(0, edge_preset()), 64u);
    EXPECT_EQ(simulate_coarse_estimator(2'048'000, edge_preset()), 1000u + 64u);
    EXPECT_EQ(simulate_coarse_estimator(2'048'000, server_preset()) - 64u, 500u);
}

TEST(Pipeline, SingleFrameHasNothingToOverlap) {
    const std::vector<StageTimes> f = {{120, 700}};
    EXPECT_EQ(pipelined_makespan(f), serialized_makespan(f));
}

TEST(Pipeline, TwoFrameHandSchedule) {
    // track1 [0,100), map1 [100,600), track2 [100,180), map2 [600,900)
    const std::vector<StageTimes> f = {{100, 500}, {80, 300}};
    EXPECT_EQ(serialized_makespan(f), 980u);
    EXPECT_EQ(pipelined_makespan(f), 980u - 80u);
}

TEST(Pipeline, NeverWorseThanSerialized) {
    Rng rng(99);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<StageTimes> f(1 + rng.below(30));
        for (auto& s : f) s = {rng.below(1000), rng.below(1000)};
        if (pipelined_makespan(f) > serialized_makespan(f)) ++violations;
        if (f.size() == 1) {
            EXPECT_EQ(pipelined_makespan(f), serialized_makespan(f));
        }
    }
    EXPECT_EQ(violations, 0);
}

TEST(Pipeline, RejectsEmptySchedule) {
    EXPECT_THROW(simulate_pipeline({}, edge_preset(), true, true), std::invalid_argument);
}

TEST(Pipeline, SimulatedTasksAreDeterministic) {
    Rng rng(4);
    std::vector<FrameTask> tasks;
    for (int f = 0; f < 4; ++f) {
        FrameTask t;
        t.frame = f;
        t.covis_blocks = 96;
        t.coarse = true;
        t.coarse_macs = 5000;
        t.refine_iters = f == 0 ? 3 : 0;
        for (int g = 0; g < 24; ++g) t.track_render.groups.push_back(random_counts(rng, 16, 10));
        t.track_render.table_entries = 400;
        t.track_render.gaussians = 100;
        t.map_render = t.track_render;
        t.map_render.tile_deltas = {{{1, 3}, {2, 0}}, {{1, 1}}};
        t.map_passes = 5;
        t.log_contributions = f % 2 == 0;
        t.skip_records = f % 2 == 0 ? 0 : 100;
        tasks.push_back(t);
    }
    const PipelineResult a = simulate_pipeline(tasks, edge_preset(), true, true);
    const PipelineResult b = simulate_pipeline(tasks, edge_preset(), true, true);
    EXPECT_EQ(a.stats, b.stats);
    EXPECT_LE(a.pipelined, a.serialized);
    EXPECT_EQ(a.stats.total_cycles, a.pipelined);
    const PipelineResult off = simulate_pipeline(tasks, edge_preset(), false, false);
    EXPECT_EQ(off.stats.total_cycles, off.serialized);
    EXPECT_LE(a.serialized, off.serialized);

    std::stringstream ss;
    write_trace(ss, tasks);
    EXPECT_EQ(read_trace(ss), tasks);
}

TEST(Trace, RejectsMissingHeader) {
    std::stringstream ss("{\"type\":\"frame\"}\n");
    EXPECT_THROW(read_trace(ss), std::runtime_error);
}

TEST(Energy, ProxyIsLinear) {
    SimStats s;
    s.ops.alpha = 10;
    s.ops.blend = 7;
    s.ops.grad = 3;
    s.ops.mac = 1000;
    s.dram_read_bytes = 480;
    SimStats d = s;
    d += s;
    const EnergyWeights w;
    EXPECT_DOUBLE_EQ(d.energy(w), 2.0 * s.energy(w));
}

TEST(Hardware, PresetsAreValid) {
    EXPECT_NO_THROW(edge_preset().validate());
    EXPECT_NO_THROW(server_preset().validate());
    EXPECT_EQ(server_preset().num_gpe_groups, 2 * edge_preset().num_gpe_groups);
    HardwareConfig bad = edge_preset();
    bad.c_grad = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    EXPECT_THROW(preset("laptop"), std::invalid_argument);
}
