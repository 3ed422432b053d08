#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ags/common/image.hpp"
#include "ags/common/parallel.hpp"
#include "ags/splat/gaussian.hpp"

namespace ags::splat {

// Projects every Gaussian in front of the near plane. Gaussians listed in
// `exclude` (indexed like `gaussians`, non-zero = excluded) are dropped.
std::vector<Gaussian2D> project_gaussians(const Scene& gaussians, const Pose& pose, const CameraIntrinsics& intr,
                                          std::span<const std::uint8_t> exclude = {});

// Pixel-centre rectangle covered by a tile, inclusive bounds.
struct TileRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    int pixel_count() const { return width() * height(); }
};

struct TileGrid {
    int tile_size = 16;
    int width = 0;
    int height = 0;

    TileGrid() = default;
    TileGrid(int image_width, int image_height, int tile) : tile_size(tile), width(image_width), height(image_height) {}

    int tiles_x() const { return (width + tile_size - 1) / tile_size; }
    int tiles_y() const { return (height + tile_size - 1) / tile_size; }
    int tile_count() const { return tiles_x() * tiles_y(); }
    TileRect rect(int tile_id) const;
};

// Tiles whose pixel rectangle meets the support box (g.extent around
// g.mean), in ascending tile id order.
std::vector<int> intersect_tiles(const Gaussian2D& g, const TileGrid& grid);

struct TableEntry {
    int gaussian_id = 0;
    double depth = 0.0;
    int index = 0;  // position in the projected list
};

struct GaussianTable {
    int tile_id = 0;
    std::vector<TableEntry> entries;  // ascending (depth, gaussian_id)
};

std::vector<GaussianTable> build_gaussian_tables(std::span<const Gaussian2D> g2ds, const TileGrid& grid);

// opacity * exp(-1/2 d^T cov^-1 d), clamped to [0, 0.99].
double compute_alpha(const Gaussian2D& g, const Vec2& pixel);

inline bool in_support(const Gaussian2D& g, const Vec2& pixel) {
    return std::abs(pixel.x() - g.mean.x()) <= g.extent.x() && std::abs(pixel.y() - g.mean.y()) <= g.extent.y();
}

// Squared Mahalanobis distance of `pixel` from the Gaussian centre.
inline double mahalanobis2(const Gaussian2D& g, const Vec2& pixel) {
    const Vec2 d = pixel - g.mean;
    return d.dot(g.conic * d);
}

struct AlphaSample {
    int table_pos = 0;
    double alpha = 0.0;
};

// Everything one tile's blending pass evaluated.
struct TileTrace {
    int tile_id = 0;
    TileRect rect;
    GaussianTable table;
    std::vector<int> pixel_begin;      // pixel_count + 1 offsets into samples
    std::vector<AlphaSample> samples;  // per pixel, in blend order
    std::vector<int> termination;      // table entries traversed per pixel

    std::span<const AlphaSample> pixel_samples(int local_pixel) const {
        return {samples.data() + pixel_begin[local_pixel],
                static_cast<std::size_t>(pixel_begin[local_pixel + 1] - pixel_begin[local_pixel])};
    }
};

struct RenderAux {
    ImageDepth final_T;
    Image<int> termination;
    std::vector<TileTrace> tiles;

    std::size_t alpha_count() const;
};

struct RenderOptions {
    int tile_size = 16;
    bool early_termination = true;
    Exec exec = Exec::kParallel;
};

struct TileRender {
    std::vector<Vec3> color;   // row-major over the tile rect
    std::vector<double> depth;
    std::vector<double> transmittance;
    TileTrace trace;
};

TileRender render_tile(const GaussianTable& table, std::span<const Gaussian2D> g2ds, const TileRect& rect,
                       bool early_termination = true);

struct RenderResult {
    ImageRGB color;
    ImageDepth depth;
    RenderAux aux;
    std::vector<Gaussian2D> projected;
    TileGrid grid;
};

RenderResult render_frame(const Scene& gaussians, const Pose& pose, const CameraIntrinsics& intr,
                          const RenderOptions& options = {}, std::span<const std::uint8_t> exclude = {});

// Untiled oracle: every pixel blends all covering Gaussians sorted by
// (depth, id). Pixel-identical to render_frame.
struct ReferenceRender {
    ImageRGB color;
    ImageDepth depth;
    ImageDepth final_T;
};

ReferenceRender render_frame_reference(const Scene& gaussians, const Pose& pose, const CameraIntrinsics& intr,
                                       bool early_termination = true);

}  // namespace ags::splat
