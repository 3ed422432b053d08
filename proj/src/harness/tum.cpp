#include "ags/harness/tum.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

namespace ags::harness {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f != nullptr) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(png_structp, png_const_charp msg) { throw std::runtime_error(std::string("png: ") + msg); }

// Decodes to 8-bit RGB (channels = 3) or native-endian 16-bit grey.
struct RawImage {
    int width = 0, height = 0;
    int bit_depth = 8;
    std::vector<std::uint8_t> rgb;
    std::vector<std::uint16_t> grey;
};

RawImage read_png(const fs::path& path, bool want_grey16) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw std::runtime_error("cannot open " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, nullptr);
    png_infop info = png_create_info_struct(png);
    RawImage out;
    try {
        png_init_io(png, f.get());
        png_read_info(png, info);
        const int color = png_get_color_type(png, info);
        const int depth = png_get_bit_depth(png, info);
        if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        if (want_grey16) {
            if (color != PNG_COLOR_TYPE_GRAY || depth != 16) throw std::runtime_error(path.string() + ": expected 16-bit grey");
            png_set_swap(png);
        } else {
            if (depth == 16) png_set_strip_16(png);
            if (depth < 8) png_set_expand(png);
            if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
        }
        png_read_update_info(png, info);
        out.width = static_cast<int>(png_get_image_width(png, info));
        out.height = static_cast<int>(png_get_image_height(png, info));
        const std::size_t row_bytes = png_get_rowbytes(png, info);
        std::vector<std::uint8_t> buf(row_bytes * out.height);
        std::vector<png_bytep> rows(out.height);
        for (int y = 0; y < out.height; ++y) rows[y] = buf.data() + y * row_bytes;
        png_read_image(png, rows.data());
        if (want_grey16) {
            out.bit_depth = 16;
            out.grey.resize(static_cast<std::size_t>(out.width) * out.height);
            for (int y = 0; y < out.height; ++y) std::memcpy(&out.grey[y * out.width], rows[y], out.width * 2);
        } else {
            out.rgb.assign(buf.begin(), buf.end());
        }
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png(const fs::path& path, int width, int height, const void* data, bool grey16) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, nullptr);
    png_infop info = png_create_info_struct(png);
    try {
        png_init_io(png, f.get());
        png_set_IHDR(png, info, width, height, grey16 ? 16 : 8, grey16 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        if (grey16) png_set_swap(png);
        const std::size_t row_bytes = static_cast<std::size_t>(width) * (grey16 ? 2 : 3);
        const auto* bytes = static_cast<const std::uint8_t*>(data);
        for (int y = 0; y < height; ++y) png_write_row(png, const_cast<png_bytep>(bytes + y * row_bytes));
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
}

struct IndexRow {
    double t = 0.0;
    std::vector<std::string> fields;
};

std::vector<IndexRow> read_index(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing index file " + path.string());
    std::vector<IndexRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        IndexRow r;
        if (!(ss >> r.t)) continue;
        std::string tok;
        while (ss >> tok) r.fields.push_back(tok);
        rows.push_back(std::move(r));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const IndexRow& a, const IndexRow& b) { return a.t < b.t; });
    return rows;
}

const IndexRow* nearest(const std::vector<IndexRow>& rows, double t, double max_dt) {
    auto it = std::lower_bound(rows.begin(), rows.end(), t, [](const IndexRow& r, double v) { return r.t < v; });
    const IndexRow* best = nullptr;
    double best_dt = max_dt;
    for (auto c : {it, it == rows.begin() ? it : std::prev(it)}) {
        if (c == rows.end()) continue;
        const double dt = std::abs(c->t - t);
        if (dt <= best_dt && (best == nullptr || dt < best_dt)) {
            best = &*c;
            best_dt = dt;
        }
    }
    return best;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string stamp_name(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    return buf;
}

Pose pose_from_fields(const std::vector<std::string>& fields) {
    double v[7];
    for (int k = 0; k < 7; ++k) v[k] = std::stod(fields[k]);
    const Eigen::Quaterniond q(v[6], v[3], v[4], v[5]);
    Pose cam_to_world;
    cam_to_world.R = q.normalized().toRotationMatrix();
    cam_to_world.t = Vec3(v[0], v[1], v[2]);
    return cam_to_world.inverse();
}

std::string pose_fields(const Pose& world_to_cam) {
    const Pose c2w = world_to_cam.inverse();
    const Eigen::Quaterniond q(c2w.R);
    return fmt(c2w.t.x()) + ' ' + fmt(c2w.t.y()) + ' ' + fmt(c2w.t.z()) + ' ' + fmt(q.x()) + ' ' + fmt(q.y()) + ' ' +
           fmt(q.z()) + ' ' + fmt(q.w());
}

std::vector<std::uint8_t> rgb_bytes(const ImageRGB& img) {
    std::vector<std::uint8_t> out(img.size() * 3);
    for (std::size_t i = 0; i < img.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            out[3 * i + c] = static_cast<std::uint8_t>(std::lround(std::clamp(img.data[i][c], 0.0, 1.0) * 255.0));
        }
    }
    return out;
}

}  // namespace

ImageRGB read_rgb_png(const fs::path& path) {
    const RawImage raw = read_png(path, false);
    ImageRGB out(raw.width, raw.height);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data[i] = Vec3(raw.rgb[3 * i], raw.rgb[3 * i + 1], raw.rgb[3 * i + 2]) / 255.0;
    }
    return out;
}

void write_rgb_png(const fs::path& path, const ImageRGB& image) {
    const std::vector<std::uint8_t> bytes = rgb_bytes(image);
    write_png(path, image.width, image.height, bytes.data(), false);
}

std::vector<StampedPose> read_trajectory(const fs::path& path) {
    std::vector<StampedPose> out;
    for (const IndexRow& r : read_index(path)) {
        if (r.fields.size() < 7) throw std::runtime_error(path.string() + ": expected 8 columns");
        out.push_back({r.t, pose_from_fields(r.fields)});
    }
    return out;
}

void write_trajectory(const fs::path& path, const std::vector<StampedPose>& poses) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# timestamp tx ty tz qx qy qz qw\n";
    for (const StampedPose& p : poses) out << stamp_name(p.timestamp) << ' ' << pose_fields(p.pose) << '\n';
}

TumSequence load_tum_rgbd(const fs::path& dir, double max_dt) {
    const auto rgb_rows = read_index(dir / "rgb.txt");
    const auto depth_rows = read_index(dir / "depth.txt");
    const auto gt_rows = read_index(dir / "groundtruth.txt");
    TumSequence out;
    for (const IndexRow& r : rgb_rows) {
        const IndexRow* d = nearest(depth_rows, r.t, max_dt);
        const IndexRow* g = nearest(gt_rows, r.t, max_dt);
        if (d == nullptr || g == nullptr || r.fields.empty() || d->fields.empty() || g->fields.size() < 7) {
            ++out.skipped;
            continue;
        }
        const RawImage rgb = read_png(dir / r.fields[0], false);
        const RawImage depth = read_png(dir / d->fields[0], true);
        if (rgb.width != depth.width || rgb.height != depth.height) {
            throw std::runtime_error("rgb/depth size mismatch at t=" + stamp_name(r.t));
        }
        Frame f;
        f.id = static_cast<int>(out.frames.size());
        f.timestamp = r.t;
        f.rgb = ImageRGB(rgb.width, rgb.height);
        f.depth = ImageDepth(rgb.width, rgb.height);
        for (std::size_t i = 0; i < f.rgb.size(); ++i) {
            f.rgb.data[i] = Vec3(rgb.rgb[3 * i], rgb.rgb[3 * i + 1], rgb.rgb[3 * i + 2]) / 255.0;
            f.depth.data[i] = depth.grey[i] / kTumDepthScale;
        }
        f.gt_pose = pose_from_fields(g->fields);
        out.frames.push_back(std::move(f));
    }
    return out;
}

void export_tum_rgbd(const fs::path& dir, const std::vector<Frame>& frames) {
    fs::create_directories(dir / "rgb");
    fs::create_directories(dir / "depth");
    std::ofstream rgb_idx(dir / "rgb.txt"), depth_idx(dir / "depth.txt"), gt_idx(dir / "groundtruth.txt");
    if (!rgb_idx || !depth_idx || !gt_idx) throw std::runtime_error("cannot write index files in " + dir.string());
    rgb_idx << "# color images\n# timestamp filename\n";
    depth_idx << "# depth maps\n# timestamp filename\n";
    gt_idx << "# ground truth trajectory\n# timestamp tx ty tz qx qy qz qw\n";
    for (const Frame& f : frames) {
        const std::string name = stamp_name(f.timestamp) + ".png";
        const std::vector<std::uint8_t> rgb = rgb_bytes(f.rgb);
        std::vector<std::uint16_t> depth(f.depth.size());
        for (std::size_t i = 0; i < f.depth.size(); ++i) {
            const double d = std::clamp(f.depth.data[i] * kTumDepthScale, 0.0, 65535.0);
            depth[i] = static_cast<std::uint16_t>(std::lround(d));
        }
        write_png(dir / "rgb" / name, f.rgb.width, f.rgb.height, rgb.data(), false);
        write_png(dir / "depth" / name, f.depth.width, f.depth.height, depth.data(), true);
        rgb_idx << stamp_name(f.timestamp) << " rgb/" << name << '\n';
        depth_idx << stamp_name(f.timestamp) << " depth/" << name << '\n';
        gt_idx << stamp_name(f.timestamp) << ' ' << pose_fields(f.gt_pose.value_or(Pose{})) << '\n';
    }
}

Frame downsample(const Frame& frame, int factor) {
    if (factor <= 1) return frame;
    Frame out = frame;
    const int w = frame.rgb.width / factor, h = frame.rgb.height / factor;
    out.rgb = ImageRGB(w, h);
    out.depth = ImageDepth(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Vec3 c = Vec3::Zero();
            double d = 0.0;
            int valid = 0;
            for (int dy = 0; dy < factor; ++dy) {
                for (int dx = 0; dx < factor; ++dx) {
                    c += frame.rgb(x * factor + dx, y * factor + dy);
                    const double z = frame.depth(x * factor + dx, y * factor + dy);
                    if (z > 0.0) {
                        d += z;
                        ++valid;
                    }
                }
            }
            out.rgb(x, y) = c / static_cast<double>(factor * factor);
            out.depth(x, y) = valid > 0 ? d / valid : 0.0;
        }
    }
    return out;
}

}  // namespace ags::harness
