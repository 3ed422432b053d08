#include "ags/splat/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ags/splat/projection_terms.hpp"

namespace ags::splat {

namespace {

Mat2 inverse_sym2(const Mat2& m) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
    const double inv_det = 1.0 / (a * c - b * b);
    Mat2 out;
    out << c * inv_det, -b * inv_det, -b * inv_det, a * inv_det;
    return out;
}

bool table_order(const TableEntry& a, const TableEntry& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.gaussian_id < b.gaussian_id;
}

// Front-to-back compositing state of one pixel.
struct BlendState {
    double transmittance = 1.0;
    Vec3 color = Vec3::Zero();
    double depth = 0.0;

    // Returns true once the pixel is saturated.
    bool add(double alpha, const Vec3& c, double z, bool early_termination) {
        const double w = transmittance * alpha;
        color += w * c;
        depth += w * z;
        transmittance *= (1.0 - alpha);
        return early_termination && transmittance < kTransmittanceCutoff;
    }
};

double support_alpha(const Gaussian2D& g, double q) {
    return std::min(kAlphaMax, g.opacity * std::exp(-0.5 * q));
}

}  // namespace

Mat3 Gaussian3D::covariance() const {
    const Mat3 r = quat_to_rotation(rotation / rotation.norm());
    const Vec3 s2 = scale.cwiseProduct(scale);
    return r * s2.asDiagonal() * r.transpose();
}

bool Gaussian3D::is_valid() const {
    if (std::abs(rotation.norm() - 1.0) > 1e-6) return false;
    if ((scale.array() <= 0.0).any()) return false;
    if (opacity < 0.0 || opacity > 1.0) return false;
    return (color.array() >= 0.0).all() && (color.array() <= 1.0).all();
}

int next_gaussian_id(const Scene& scene) {
    int next = 0;
    for (const auto& g : scene) next = std::max(next, g.id + 1);
    return next;
}

std::vector<Gaussian2D> project_gaussians(const Scene& gaussians, const Pose& pose, const CameraIntrinsics& intr,
                                          std::span<const std::uint8_t> exclude) {
    std::vector<Gaussian2D> out;
    out.reserve(gaussians.size());
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        if (!exclude.empty() && exclude[i]) continue;
        const Gaussian3D& g = gaussians[i];
        const ProjectionTerms t = projection_terms(g, pose, intr);
        if (!t.visible) continue;
        Gaussian2D g2;
        g2.id = g.id;
        g2.source = static_cast<int>(i);
        g2.mean = t.mean;
        g2.cov = t.cov;
        g2.conic = inverse_sym2(t.cov);
        g2.extent = Vec2(kSupportSigmas * std::sqrt(t.cov(0, 0)), kSupportSigmas * std::sqrt(t.cov(1, 1)));
        g2.depth = t.p_cam.z();
        g2.opacity = g.opacity;
        g2.color = g.color;
        out.push_back(g2);
    }
    return out;
}

TileRect TileGrid::rect(int tile_id) const {
    const int tx = tile_id % tiles_x();
    const int ty = tile_id / tiles_x();
    TileRect r;
    r.x0 = tx * tile_size;
    r.y0 = ty * tile_size;
    r.x1 = std::min(r.x0 + tile_size, width) - 1;
    r.y1 = std::min(r.y0 + tile_size, height) - 1;
    return r;
}

std::vector<int> intersect_tiles(const Gaussian2D& g, const TileGrid& grid) {
    std::vector<int> out;
    const double rx = g.extent.x();
    const double ry = g.extent.y();
    const double xmin = g.mean.x() - rx, xmax = g.mean.x() + rx;
    const double ymin = g.mean.y() - ry, ymax = g.mean.y() + ry;
    if (xmax < 0.0 || ymax < 0.0 || xmin > grid.width - 1 || ymin > grid.height - 1) return out;

    const int n = grid.tile_size;
    const int tx0 = std::max(0, static_cast<int>(std::floor(xmin / n)));
    const int tx1 = std::min(grid.tiles_x() - 1, static_cast<int>(std::floor(xmax / n)));
    const int ty0 = std::max(0, static_cast<int>(std::floor(ymin / n)));
    const int ty1 = std::min(grid.tiles_y() - 1, static_cast<int>(std::floor(ymax / n)));
    for (int ty = ty0; ty <= ty1; ++ty) {
        for (int tx = tx0; tx <= tx1; ++tx) {
            const int id = ty * grid.tiles_x() + tx;
            const TileRect r = grid.rect(id);
            if (xmax >= r.x0 && xmin <= r.x1 && ymax >= r.y0 && ymin <= r.y1) out.push_back(id);
        }
    }
    return out;
}

std::vector<GaussianTable> build_gaussian_tables(std::span<const Gaussian2D> g2ds, const TileGrid& grid) {
    std::vector<GaussianTable> tables(grid.tile_count());
    for (int t = 0; t < grid.tile_count(); ++t) tables[t].tile_id = t;
    for (std::size_t i = 0; i < g2ds.size(); ++i) {
        for (int tile : intersect_tiles(g2ds[i], grid)) {
            tables[tile].entries.push_back({g2ds[i].id, g2ds[i].depth, static_cast<int>(i)});
        }
    }
    for (auto& table : tables) std::sort(table.entries.begin(), table.entries.end(), table_order);
    return tables;
}

double compute_alpha(const Gaussian2D& g, const Vec2& pixel) {
    return std::clamp(g.opacity * std::exp(-0.5 * mahalanobis2(g, pixel)), 0.0, kAlphaMax);
}

std::size_t RenderAux::alpha_count() const {
    std::size_t n = 0;
    for (const auto& t : tiles) n += t.samples.size();
    return n;
}

TileRender render_tile(const GaussianTable& table, std::span<const Gaussian2D> g2ds, const TileRect& rect,
                       bool early_termination) {
    TileRender out;
    const int npix = rect.pixel_count();
    out.color.assign(npix, Vec3::Zero());
    out.depth.assign(npix, 0.0);
    out.transmittance.assign(npix, 1.0);
    TileTrace& trace = out.trace;
    trace.tile_id = table.tile_id;
    trace.rect = rect;
    trace.table = table;
    trace.pixel_begin.resize(npix + 1);
    trace.termination.resize(npix);

    const int count = static_cast<int>(table.entries.size());
    int local = 0;
    for (int y = rect.y0; y <= rect.y1; ++y) {
        for (int x = rect.x0; x <= rect.x1; ++x, ++local) {
            trace.pixel_begin[local] = static_cast<int>(trace.samples.size());
            const Vec2 pixel(x, y);
            BlendState state;
            int traversed = count;
            for (int pos = 0; pos < count; ++pos) {
                const Gaussian2D& g = g2ds[table.entries[pos].index];
                if (!in_support(g, pixel)) continue;
                const double alpha = support_alpha(g, mahalanobis2(g, pixel));
                trace.samples.push_back({pos, alpha});
                if (state.add(alpha, g.color, g.depth, early_termination)) {
                    traversed = pos + 1;
                    break;
                }
            }
            trace.termination[local] = traversed;
            out.color[local] = state.color;
            out.depth[local] = state.depth;
            out.transmittance[local] = state.transmittance;
        }
    }
    trace.pixel_begin[npix] = static_cast<int>(trace.samples.size());
    return out;
}

RenderResult render_frame(const Scene& gaussians, const Pose& pose, const CameraIntrinsics& intr,
                          const RenderOptions& options, std::span<const std::uint8_t> exclude) {
    RenderResult result;
    result.grid = TileGrid(intr.width, intr.height, options.tile_size);
    result.projected = project_gaussians(gaussians, pose, intr, exclude);
    const std::vector<GaussianTable> tables = build_gaussian_tables(result.projected, result.grid);

    const int ntiles = result.grid.tile_count();
    std::vector<TileRender> tiles(ntiles);
    const std::span<const Gaussian2D> g2ds(result.projected);
    const bool parallel = options.exec == Exec::kParallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int t = 0; t < ntiles; ++t) {
        tiles[t] = render_tile(tables[t], g2ds, result.grid.rect(t), options.early_termination);
    }

    result.color = ImageRGB(intr.width, intr.height, Vec3::Zero());
    result.depth = ImageDepth(intr.width, intr.height, 0.0);
    result.aux.final_T = ImageDepth(intr.width, intr.height, 1.0);
    result.aux.termination = Image<int>(intr.width, intr.height, 0);
    result.aux.tiles.reserve(ntiles);
    for (int t = 0; t < ntiles; ++t) {
        TileRender& tr = tiles[t];
        const TileRect& r = tr.trace.rect;
        int local = 0;
        for (int y = r.y0; y <= r.y1; ++y) {
            for (int x = r.x0; x <= r.x1; ++x, ++local) {
                result.color(x, y) = tr.color[local];
                result.depth(x, y) = tr.depth[local];
                result.aux.termination(x, y) = tr.trace.termination[local];
                result.aux.final_T(x, y) = tr.transmittance[local];
            }
        }
        result.aux.tiles.push_back(std::move(tr.trace));
    }
    return result;
}

ReferenceRender render_frame_reference(const Scene& gaussians, const Pose& pose, const CameraIntrinsics& intr,
                                       bool early_termination) {
    std::vector<Gaussian2D> g2ds = project_gaussians(gaussians, pose, intr);
    std::sort(g2ds.begin(), g2ds.end(), [](const Gaussian2D& a, const Gaussian2D& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id < b.id;
    });

    ReferenceRender out;
    out.color = ImageRGB(intr.width, intr.height, Vec3::Zero());
    out.depth = ImageDepth(intr.width, intr.height, 0.0);
    out.final_T = ImageDepth(intr.width, intr.height, 1.0);
    for (int y = 0; y < intr.height; ++y) {
        for (int x = 0; x < intr.width; ++x) {
            const Vec2 pixel(x, y);
            BlendState state;
            for (const Gaussian2D& g : g2ds) {
                if (!in_support(g, pixel)) continue;
                if (state.add(support_alpha(g, mahalanobis2(g, pixel)), g.color, g.depth, early_termination)) break;
            }
            out.color(x, y) = state.color;
            out.depth(x, y) = state.depth;
            out.final_T(x, y) = state.transmittance;
        }
    }
    return out;
}

}  // namespace ags::splat
