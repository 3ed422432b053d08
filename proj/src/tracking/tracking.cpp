#include "ags/tracking/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ags/common/align.hpp"

namespace ags::tracking {

namespace {

int median(std::vector<int> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

double depth_at(const ImageDepth& depth, double x, double y) {
    const int ix = static_cast<int>(std::lround(x));
    const int iy = static_cast<int>(std::lround(y));
    if (ix < 0 || iy < 0 || ix >= depth.width || iy >= depth.height) return 0.0;
    return depth(ix, iy);
}

Vec3 back_project(double x, double y, double z, const splat::CameraIntrinsics& intr) {
    return {(x - intr.cx) * z / intr.fx, (y - intr.cy) * z / intr.fy, z};
}

// Vertex offset of the parabola through (-1, minus), (0, centre), (1, plus),
// limited to half a sample.
double parabola_offset(double minus, double centre, double plus) {
    const double denom = minus - 2.0 * centre + plus;
    if (denom <= 0.0) return 0.0;
    return std::clamp(0.5 * (minus - plus) / denom, -0.5, 0.5);
}

// Gauss-Newton on the reprojection error of `points` (camera frame of the
// reference view) against pixel positions `uv`, Huber-weighted at 1 px.
Pose refine_reprojection(Pose a, const std::vector<Vec3>& points, const std::vector<Vec2>& uv,
                         const splat::CameraIntrinsics& intr) {
    constexpr int kIterations = 10;
    constexpr double kHuber = 1.0;
    for (int it = 0; it < kIterations; ++it) {
        Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
        Vec6 b = Vec6::Zero();
        for (std::size_t i = 0; i < points.size(); ++i) {
            const Vec3 p = a.transform(points[i]);
            if (p.z() <= splat::kNearPlane) continue;
            const double iz = 1.0 / p.z();
            const Vec2 r(intr.fx * p.x() * iz + intr.cx - uv[i].x(), intr.fy * p.y() * iz + intr.cy - uv[i].y());
            Eigen::Matrix<double, 2, 3> dproj;
            dproj << intr.fx * iz, 0.0, -intr.fx * p.x() * iz * iz, 0.0, intr.fy * iz, -intr.fy * p.y() * iz * iz;
            Eigen::Matrix<double, 3, 6> dp;
            dp.leftCols<3>() = Mat3::Identity();
            dp.rightCols<3>() = -skew(p);
            const Eigen::Matrix<double, 2, 6> j = dproj * dp;
            const double norm = r.norm();
            const double w = norm <= kHuber ? 1.0 : kHuber / norm;
            h += w * j.transpose() * j;
            b += w * j.transpose() * r;
        }
        const Vec6 step = h.ldlt().solve(-b);
        if (!step.allFinite()) break;
        a = Pose::exp(step) * a;
        if (step.norm() < 1e-10) break;
    }
    return a;
}

}  // namespace

Pose constant_velocity(const TrackingState& prev) { return prev.prev_delta * prev.prev_pose; }

Pose MotionDepthEstimator::estimate(const TrackingState& prev, const Frame& cur,
                                    std::span<const codec::MotionResult> motion,
                                    const splat::CameraIntrinsics& intr) const {
    struct Candidate {
        const codec::MotionResult* m;
        double cx, cy, px, py, z_prev, z_cur;
    };
    std::vector<Candidate> cands;
    const ImageLuma cur_luma = codec::to_luma(cur.rgb);
    const ImageLuma prev_luma = codec::to_luma(prev.prev_frame.rgb);
    for (const auto& m : motion) {
        const double cx = m.x0 + 0.5 * (m.size - 1);
        const double cy = m.y0 + 0.5 * (m.size - 1);
        // Sub-sample refinement from the SAD surface around the integer match.
        codec::MacroBlock block{m.x0, m.y0, m.size, {}};
        block.samples.resize(static_cast<std::size_t>(m.size) * m.size);
        for (int y = 0; y < m.size; ++y) {
            for (int x = 0; x < m.size; ++x) {
                const int sx = std::min(m.x0 + x, cur_luma.width - 1), sy = std::min(m.y0 + y, cur_luma.height - 1);
                block.samples[y * m.size + x] = cur_luma(sx, sy);
            }
        }
        // An exact match stays on the integer offset.
        const double s0 = m.sad_min;
        const double fx = s0 == 0.0 ? 0.0
                                    : parabola_offset(codec::sad_at(block, prev_luma, m.dx - 1, m.dy), s0,
                                                      codec::sad_at(block, prev_luma, m.dx + 1, m.dy));
        const double fy = s0 == 0.0 ? 0.0
                                    : parabola_offset(codec::sad_at(block, prev_luma, m.dx, m.dy - 1), s0,
                                                      codec::sad_at(block, prev_luma, m.dx, m.dy + 1));
        const double px = cx + m.dx + fx, py = cy + m.dy + fy;
        const double z_prev = depth_at(prev.prev_frame.depth, px, py);
        const double z_cur = depth_at(cur.depth, cx, cy);
        if (z_prev > 0.0 && z_cur > 0.0) cands.push_back({&m, cx, cy, px, py, z_prev, z_cur});
    }
    if (cands.size() < 3) return constant_velocity(prev);

    std::vector<int> dxs, dys;
    for (const auto& c : cands) {
        dxs.push_back(c.m->dx);
        dys.push_back(c.m->dy);
    }
    const int mdx = median(dxs), mdy = median(dys);
    std::vector<Vec3> src, dst;
    std::vector<Vec2> uv;
    for (const auto& c : cands) {
        if (std::abs(c.m->dx - mdx) > 1 || std::abs(c.m->dy - mdy) > 1) continue;
        src.push_back(back_project(c.px, c.py, c.z_prev, intr));
        dst.push_back(back_project(c.cx, c.cy, c.z_cur, intr));
        uv.emplace_back(c.cx, c.cy);
    }
    if (src.size() < 3) return constant_velocity(prev);
    return refine_reprojection(rigid_align(src, dst), src, uv, intr) * prev.prev_pose;
}

Pose coarse_estimate(const TrackingState& prev, const Frame& cur, std::span<const codec::MotionResult> motion,
                     const splat::CameraIntrinsics& intr) {
    return MotionDepthEstimator{}.estimate(prev, cur, motion, intr);
}

Frame render_model_frame(const splat::Scene& scene, const Pose& pose, const splat::CameraIntrinsics& intr,
                         Exec exec, splat::RenderResult* render) {
    splat::RenderOptions opt;
    opt.exec = exec;
    splat::RenderResult r = splat::render_frame(scene, pose, intr, opt);
    Frame out;
    out.rgb = r.color;
    out.depth = ImageDepth(intr.width, intr.height, 0.0);
    for (int y = 0; y < intr.height; ++y) {
        for (int x = 0; x < intr.width; ++x) {
            const double cover = 1.0 - r.aux.final_T(x, y);
            if (cover >= 0.5) out.depth(x, y) = r.depth(x, y) / cover;
        }
    }
    if (render != nullptr) *render = std::move(r);
    return out;
}

ModelAlignment align_to_model(const Pose& pose, const Frame& cur, const splat::Scene& scene,
                              const splat::CameraIntrinsics& intr, const TrackingConfig& cfg) {
    ModelAlignment out;
    out.pose = pose;
    if (scene.empty()) return out;
    splat::RenderResult render;
    TrackingState model;
    model.initialized = true;
    model.prev_pose = pose;
    model.prev_frame = render_model_frame(scene, pose, intr, cfg.exec, &render);
    const codec::CovisibilityReport report = codec::frame_covisibility(cur, model.prev_frame, cfg.motion);
    out.blocks = report.motion.size();
    out.pose = MotionDepthEstimator{}.estimate(model, cur, report.motion, intr);
    out.render = std::move(render);
    return out;
}

RefineResult refine_pose(const Pose& pose, const Frame& frame, const splat::Scene& scene,
                         const splat::CameraIntrinsics& intr, const TrackingConfig& cfg, int iterations) {
    RefineResult out;
    out.pose = pose;
    if (scene.empty() || iterations <= 0) return out;

    splat::GradientOptions opt;
    opt.lambda_depth = cfg.lambda_depth;
    opt.want_gaussians = false;
    opt.render.exec = cfg.exec;
    Pose current = pose;
    // Adam moments on the twist gradient.
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-12;
    Vec6 m = Vec6::Zero(), v = Vec6::Zero();
    for (int it = 0; it < iterations; ++it) {
        splat::GradientResult g = splat::loss_and_gradients(scene, current, intr, frame, opt);
        if (it == 0) {
            out.initial_loss = g.loss;
            out.best_loss = g.loss;
        }
        if (g.loss < out.best_loss) {
            out.best_loss = g.loss;
            out.pose = current;
        }
        ++out.iterations;
        m = kBeta1 * m + (1.0 - kBeta1) * g.pose;
        v = kBeta2 * v + (1.0 - kBeta2) * g.pose.cwiseProduct(g.pose);
        const Vec6 mh = m / (1.0 - std::pow(kBeta1, it + 1));
        const Vec6 vh = v / (1.0 - std::pow(kBeta2, it + 1));
        const Vec6 step = mh.array() / (vh.array().sqrt() + kEps);
        current = splat::update_pose(current, step, cfg.pose_lr);
        if (it + 1 == iterations) out.last_render = std::move(g.render);
    }
    return out;
}

TrackingState advance(const TrackingState& state, const Frame& cur, const Pose& pose) {
    TrackingState next;
    next.initialized = true;
    next.prev_delta = state.initialized ? pose * state.prev_pose.inverse() : Pose{};
    next.prev_pose = pose;
    next.prev_frame = cur;
    return next;
}

TrackResult track(const Frame& cur, const TrackingState& state, const splat::Scene& scene,
                  const splat::CameraIntrinsics& intr, const TrackingConfig& cfg, const CoarseEstimator& estimator,
                  const Pose& initial_pose) {
    TrackResult out;
    if (!state.initialized) {
        out.pose = out.coarse_pose = initial_pose;
        out.used_refinement = true;
        return out;
    }
    const codec::CovisibilityReport report = codec::frame_covisibility(cur, state.prev_frame, cfg.motion);
    out.fc = report.fc;
    out.level = report.level;
    out.motion_blocks = report.motion.size();
    out.coarse_pose = estimator.estimate(state, cur, report.motion, intr);
    if (cfg.model_alignment) {
        ModelAlignment a = align_to_model(out.coarse_pose, cur, scene, intr, cfg);
        out.coarse_pose = a.pose;
        out.model_blocks = a.blocks;
        out.model_render = std::move(a.render);
    }
    out.pose = out.coarse_pose;
    out.used_refinement = report.fc < cfg.thresh_t;
    if (out.used_refinement) {
        RefineResult r = refine_pose(out.coarse_pose, cur, scene, intr, cfg, cfg.iter_t);
        out.pose = r.pose;
        out.iterations = r.iterations;
        out.loss = r.best_loss;
        out.last_render = std::move(r.last_render);
    }
    return out;
}

TrackResult track_baseline(const Frame& cur, const TrackingState& state, const splat::Scene& scene,
                           const splat::CameraIntrinsics& intr, const TrackingConfig& cfg, const Pose& initial_pose) {
    TrackResult out;
    out.used_refinement = true;
    if (!state.initialized) {
        out.pose = out.coarse_pose = initial_pose;
        return out;
    }
    out.coarse_pose = constant_velocity(state);
    RefineResult r = refine_pose(out.coarse_pose, cur, scene, intr, cfg, cfg.baseline_iters);
    out.pose = r.pose;
    out.iterations = r.iterations;
    out.loss = r.best_loss;
    out.last_render = std::move(r.last_render);
    return out;
}

}  // namespace ags::tracking
