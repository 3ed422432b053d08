#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <vector>

#include "ags/common/math.hpp"
#include "ags/common/pose.hpp"

namespace ags {

// Row-major 2D image.
template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, const T& fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    T& operator()(int x, int y) {
        assert(x >= 0 && x < width && y >= 0 && y < height);
        return data[static_cast<std::size_t>(y) * width + x];
    }
    const T& operator()(int x, int y) const {
        assert(x >= 0 && x < width && y >= 0 && y < height);
        return data[static_cast<std::size_t>(y) * width + x];
    }

    // Edge-replicated read.
    const T& clamped(int x, int y) const {
        x = x < 0 ? 0 : (x >= width ? width - 1 : x);
        y = y < 0 ? 0 : (y >= height ? height - 1 : y);
        return data[static_cast<std::size_t>(y) * width + x];
    }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
    bool same_shape(const auto& other) const { return width == other.width && height == other.height; }

    bool operator==(const Image&) const = default;
};

using ImageRGB = Image<Vec3>;
using ImageDepth = Image<double>;
using ImageLuma = Image<std::uint8_t>;

// One RGB-D observation. Depth <= 0 marks an invalid sample.
struct Frame {
    int id = 0;
    double timestamp = 0.0;
    ImageRGB rgb;
    ImageDepth depth;
    std::optional<Pose> gt_pose;
};

}  // namespace ags
