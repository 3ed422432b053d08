#include "ags/harness/capture.hpp"

#include <map>

namespace ags::harness {

std::vector<GroupPixels> pixel_groups(const splat::RenderResult& render) {
    constexpr int kSide = 4;
    std::vector<GroupPixels> out;
    for (std::size_t t = 0; t < render.aux.tiles.size(); ++t) {
        const splat::TileRect& r = render.aux.tiles[t].rect;
        const int w = r.width(), h = r.height();
        for (int gy = 0; gy < h; gy += kSide) {
            for (int gx = 0; gx < w; gx += kSide) {
                GroupPixels g;
                g.tile = static_cast<int>(t);
                for (int y = gy; y < std::min(gy + kSide, h); ++y) {
                    for (int x = gx; x < std::min(gx + kSide, w); ++x) g.local.push_back(y * w + x);
                }
                out.push_back(std::move(g));
            }
        }
    }
    return out;
}

std::vector<sim::GroupTrace> group_traces(const splat::RenderResult& render) {
    std::vector<sim::GroupTrace> out;
    for (const GroupPixels& g : pixel_groups(render)) {
        const splat::TileTrace& tile = render.aux.tiles[g.tile];
        sim::GroupTrace trace;
        for (int local : g.local) {
            std::vector<sim::EvalItem> items;
            for (const splat::AlphaSample& s : tile.pixel_samples(local)) {
                const splat::TableEntry& e = tile.table.entries[s.table_pos];
                const splat::Gaussian2D& g2 = render.projected[e.index];
                items.push_back({e.gaussian_id, s.alpha, g2.color, g2.depth});
            }
            trace.pixels.push_back(std::move(items));
        }
        out.push_back(std::move(trace));
    }
    return out;
}

sim::RenderWork render_work(const splat::RenderResult& render, bool deltas, double thresh_alpha) {
    sim::RenderWork w;
    w.gaussians = render.projected.size();
    for (const GroupPixels& g : pixel_groups(render)) {
        const splat::TileTrace& tile = render.aux.tiles[g.tile];
        std::vector<std::uint32_t> counts;
        for (int local : g.local) counts.push_back(static_cast<std::uint32_t>(tile.pixel_samples(local).size()));
        w.groups.push_back(std::move(counts));
    }
    for (const splat::TileTrace& tile : render.aux.tiles) {
        w.table_entries += tile.table.entries.size();
        if (!deltas) continue;
        std::map<int, std::uint32_t> per_pos;  // table position -> sub-threshold count
        for (const splat::AlphaSample& s : tile.samples) {
            std::uint32_t& c = per_pos[s.table_pos];
            if (s.alpha < thresh_alpha) ++c;
        }
        sim::TileDeltas td;
        for (const auto& [pos, c] : per_pos) td.emplace_back(tile.table.entries[pos].gaussian_id, c);
        w.tile_deltas.push_back(std::move(td));
    }
    return w;
}

}  // namespace ags::harness
