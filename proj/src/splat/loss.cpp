#include "ags/splat/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace ags::splat {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_shapes(const ImageRGB& color, const ImageDepth& depth, const Frame& observed) {
    if (!color.same_shape(observed.rgb) || !depth.same_shape(observed.rgb) || !observed.depth.same_shape(observed.rgb)) {
        throw std::invalid_argument("photometric_depth_loss: image dimensions differ");
    }
}

}  // namespace

LossGradient photometric_depth_loss_grad(const ImageRGB& color, const ImageDepth& depth, const Frame& observed,
                                         double lambda_depth, const Image<std::uint8_t>* ignore) {
    check_shapes(color, depth, observed);
    if (ignore != nullptr && !ignore->same_shape(observed.rgb)) {
        throw std::invalid_argument("photometric_depth_loss: ignore mask dimensions differ");
    }
    LossGradient out;
    out.d_color = ImageRGB(color.width, color.height, Vec3::Zero());
    out.d_depth = ImageDepth(color.width, color.height, 0.0);
    const std::size_t n = color.size();
    if (n == 0) return out;

    std::size_t valid = 0;
    for (double d : observed.depth.data) valid += d > 0.0 ? 1 : 0;

    double color_sum = 0.0;
    double depth_sum = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double depth_scale = valid > 0 ? lambda_depth / static_cast<double>(valid) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (ignore != nullptr && ignore->data[i]) continue;
        const Vec3 diff = color.data[i] - observed.rgb.data[i];
        for (int c = 0; c < 3; ++c) {
            color_sum += std::abs(diff[c]);
            out.d_color.data[i][c] = sign(diff[c]) * inv_n;
        }
        if (observed.depth.data[i] > 0.0) {
            const double dd = depth.data[i] - observed.depth.data[i];
            depth_sum += std::abs(dd);
            out.d_depth.data[i] = sign(dd) * depth_scale;
        }
    }
    out.loss = color_sum * inv_n + (valid > 0 ? lambda_depth * depth_sum / static_cast<double>(valid) : 0.0);
    return out;
}

double photometric_depth_loss(const ImageRGB& color, const ImageDepth& depth, const Frame& observed,
                              double lambda_depth) {
    return photometric_depth_loss_grad(color, depth, observed, lambda_depth).loss;
}

}  // namespace ags::splat
