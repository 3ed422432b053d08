#include "ags/splat/gradients.hpp"

#include <array>
#include <cmath>

#include "ags/splat/projection_terms.hpp"

namespace ags::splat {

namespace {

// Partial derivatives of quat_to_rotation with respect to (w, x, y, z).
std::array<Mat3, 4> rotation_jacobian(const Vec4& q) {
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    std::array<Mat3, 4> d;
    d[0] << 0.0, -z, y,
            z, 0.0, -x,
            -y, x, 0.0;
    d[1] << 0.0, y, z,
            y, -2.0 * x, -w,
            z, w, -2.0 * x;
    d[2] << -2.0 * y, x, w,
            x, 0.0, z,
            -w, z, -2.0 * y;
    d[3] << -2.0 * z, -w, x,
            w, -2.0 * z, y,
            x, y, 0.0;
    for (auto& m : d) m *= 2.0;
    return d;
}

void backward_tile(const TileTrace& trace, std::span<const Gaussian2D> g2ds, const ImageRGB& d_color,
                   const ImageDepth& d_depth, std::vector<ScreenGradient>& acc) {
    const auto& entries = trace.table.entries;
    acc.assign(entries.size(), ScreenGradient{});
    std::vector<double> before;  // transmittance ahead of each sample
    int local = 0;
    for (int y = trace.rect.y0; y <= trace.rect.y1; ++y) {
        for (int x = trace.rect.x0; x <= trace.rect.x1; ++x, ++local) {
            const auto samples = trace.pixel_samples(local);
            if (samples.empty()) continue;
            const Vec3 gc = d_color(x, y);
            const double gd = d_depth(x, y);
            if (gc.isZero(0.0) && gd == 0.0) continue;

            before.resize(samples.size());
            double t = 1.0;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                before[i] = t;
                t *= (1.0 - samples[i].alpha);
            }

            const Vec2 pixel(x, y);
            Vec3 suffix_c = Vec3::Zero();
            double suffix_d = 0.0;
            for (std::size_t k = samples.size(); k-- > 0;) {
                const int pos = samples[k].table_pos;
                const double a = samples[k].alpha;
                const Gaussian2D& g = g2ds[entries[pos].index];
                const double w = before[k] * a;
                ScreenGradient& s = acc[pos];
                s.color += w * gc;
                s.depth += w * gd;

                const double inv = 1.0 / (1.0 - a);
                const double g_alpha = gc.dot(before[k] * g.color - suffix_c * inv) + gd * (before[k] * g.depth - suffix_d * inv);
                suffix_c += w * g.color;
                suffix_d += w * g.depth;

                const Vec2 d = pixel - g.mean;
                const double gauss = std::exp(-0.5 * d.dot(g.conic * d));
                if (g.opacity * gauss > kAlphaMax) continue;  // clamped: flat in every input
                s.opacity += g_alpha * gauss;
                const double g_q = -0.5 * g_alpha * g.opacity * gauss;
                s.mean += -2.0 * g_q * (g.conic * d);
                s.conic += g_q * (d * d.transpose());
            }
        }
    }
}

struct ChainResult {
    GaussianGradient grad;
    Vec6 pose = Vec6::Zero();
};

ChainResult chain_to_world(const Gaussian3D& g, const ScreenGradient& sg, const Gaussian2D& g2, const Pose& pose,
                           const CameraIntrinsics& intr) {
    ChainResult out;
    const ProjectionTerms t = projection_terms(g, pose, intr);
    out.grad.color = sg.color;
    out.grad.opacity = sg.opacity;

    const Mat2& a = g2.conic;
    const Mat2 g_cov = -a * sg.conic * a;
    const Mat23& j = t.jacobian;
    const Mat23 g_j = 2.0 * g_cov * j * t.sigma_cam;
    const Mat3 g_sigma_cam = j.transpose() * g_cov * j;

    const double x = t.p_cam.x(), y = t.p_cam.y(), z = t.p_cam.z();
    const double z2 = z * z, z3 = z2 * z;
    Vec3 g_p = j.transpose() * sg.mean;
    g_p.x() += g_j(0, 2) * (-intr.fx / z2);
    g_p.y() += g_j(1, 2) * (-intr.fy / z2);
    g_p.z() += g_j(0, 0) * (-intr.fx / z2) + g_j(0, 2) * (2.0 * intr.fx * x / z3) + g_j(1, 1) * (-intr.fy / z2) +
               g_j(1, 2) * (2.0 * intr.fy * y / z3);
    g_p.z() += sg.depth;

    const Mat3& w = pose.R;
    const Mat3 g_sigma = w.transpose() * g_sigma_cam * w;
    const Mat3 g_w = 2.0 * g_sigma_cam * w * t.sigma;

    const Vec3 s2 = g.scale.cwiseProduct(g.scale);
    const Mat3 g_r = 2.0 * g_sigma * t.rot * s2.asDiagonal();
    const Mat3 local = t.rot.transpose() * g_sigma * t.rot;
    for (int k = 0; k < 3; ++k) out.grad.scale[k] = 2.0 * g.scale[k] * local(k, k);

    const auto d_rot = rotation_jacobian(t.quat_unit);
    Vec4 g_unit;
    for (int k = 0; k < 4; ++k) g_unit[k] = g_r.cwiseProduct(d_rot[k]).sum();
    out.grad.rotation = (g_unit - t.quat_unit * t.quat_unit.dot(g_unit)) / t.quat_norm;

    out.grad.mu = w.transpose() * g_p;

    const Mat3 m = g_w * w.transpose();
    const Vec3 g_omega_cov(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    out.pose.head<3>() = g_p;
    out.pose.tail<3>() = t.p_cam.cross(g_p) + g_omega_cov;
    return out;
}

}  // namespace

bool GaussianGradient::is_zero() const {
    return mu.isZero(0.0) && scale.isZero(0.0) && rotation.isZero(0.0) && opacity == 0.0 && color.isZero(0.0);
}

std::vector<ScreenGradient> backward_blend(const RenderResult& render, const ImageRGB& d_color,
                                           const ImageDepth& d_depth, Exec exec) {
    const int ntiles = static_cast<int>(render.aux.tiles.size());
    std::vector<std::vector<ScreenGradient>> per_tile(ntiles);
    const std::span<const Gaussian2D> g2ds(render.projected);
    const bool parallel = exec == Exec::kParallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int t = 0; t < ntiles; ++t) backward_tile(render.aux.tiles[t], g2ds, d_color, d_depth, per_tile[t]);

    std::vector<ScreenGradient> out(render.projected.size());
    for (int t = 0; t < ntiles; ++t) {
        const auto& entries = render.aux.tiles[t].table.entries;
        for (std::size_t p = 0; p < entries.size(); ++p) {
            ScreenGradient& dst = out[entries[p].index];
            const ScreenGradient& src = per_tile[t][p];
            dst.mean += src.mean;
            dst.conic += src.conic;
            dst.opacity += src.opacity;
            dst.color += src.color;
            dst.depth += src.depth;
        }
    }
    return out;
}

GradientResult loss_and_gradients(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr,
                                  const Frame& frame, const GradientOptions& options,
                                  std::span<const std::uint8_t> exclude) {
    GradientResult out;
    out.render = render_frame(scene, pose, intr, options.render, exclude);
    const LossGradient lg =
        photometric_depth_loss_grad(out.render.color, out.render.depth, frame, options.lambda_depth,
                                    options.ignore_pixels);
    out.loss = lg.loss;
    if (options.want_gaussians) out.gaussians.assign(scene.size(), GaussianGradient{});
    if (!options.want_gaussians && !options.want_pose) return out;

    const std::vector<ScreenGradient> screen = backward_blend(out.render, lg.d_color, lg.d_depth, options.render.exec);
    const int n = static_cast<int>(out.render.projected.size());
    std::vector<ChainResult> chained(n);
    const bool parallel = options.render.exec == Exec::kParallel;
#pragma omp parallel for schedule(static) if (parallel)
    for (int k = 0; k < n; ++k) {
        const Gaussian2D& g2 = out.render.projected[k];
        chained[k] = chain_to_world(scene[g2.source], screen[k], g2, pose, intr);
    }
    for (int k = 0; k < n; ++k) {
        if (options.want_gaussians) out.gaussians[out.render.projected[k].source] = chained[k].grad;
        out.pose += chained[k].pose;
    }
    return out;
}

std::vector<GaussianGradient> gaussian_gradients(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr,
                                                 const Frame& frame, const GradientOptions& options) {
    GradientOptions o = options;
    o.want_gaussians = true;
    return loss_and_gradients(scene, pose, intr, frame, o).gaussians;
}

Vec6 pose_gradient(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr, const Frame& frame,
                   const GradientOptions& options) {
    GradientOptions o = options;
    o.want_gaussians = false;
    o.want_pose = true;
    return loss_and_gradients(scene, pose, intr, frame, o).pose;
}

}  // namespace ags::splat
