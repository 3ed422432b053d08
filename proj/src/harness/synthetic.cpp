#include "ags/harness/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ags/common/rng.hpp"
#include "ags/splat/raster.hpp"

namespace ags::harness {

namespace {

Vec4 yaw_quat(double angle) { return Vec4(std::cos(0.5 * angle), 0.0, 0.0, std::sin(0.5 * angle)); }

Pose look_from(const Vec3& center, const Mat3& cam_to_world) {
    Pose p;
    p.R = cam_to_world.transpose();
    p.t = -p.R * center;
    return p;
}

Mat3 euler(double rx, double ry, double rz) {
    return so3_exp(Vec3(0, 0, rz)) * so3_exp(Vec3(0, ry, 0)) * so3_exp(Vec3(rx, 0, 0));
}

}  // namespace

std::string to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::kStatic: return "static";
        case TrajectoryKind::kPan: return "pan";
        case TrajectoryKind::kOrbit: return "orbit";
        case TrajectoryKind::kRandomWalk: return "random-walk";
        case TrajectoryKind::kRandomJump: return "random-jump";
    }
    return "unknown";
}

std::optional<TrajectoryKind> trajectory_from_string(const std::string& name) {
    for (auto k : {TrajectoryKind::kStatic, TrajectoryKind::kPan, TrajectoryKind::kOrbit, TrajectoryKind::kRandomWalk,
                   TrajectoryKind::kRandomJump}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

splat::CameraIntrinsics synthetic_intrinsics(const SyntheticSpec& spec) {
    splat::CameraIntrinsics intr;
    intr.fx = spec.fx;
    intr.fy = spec.fy;
    intr.cx = spec.cx;
    intr.cy = spec.cy;
    intr.width = spec.width;
    intr.height = spec.height;
    return intr;
}

splat::Scene synthetic_gaussians(const SyntheticSpec& spec) {
    if (spec.gaussian_count < 1) throw std::invalid_argument("generate_synthetic: gaussian_count must be >= 1");
    Rng rng(mix_seed(spec.seed, 0x5ce7e));
    const int fg = std::min(spec.gaussian_count - 1,
                            static_cast<int>(std::lround(spec.foreground_fraction * spec.gaussian_count)));
    const int wall = spec.gaussian_count - fg;

    // Jittered grid of flat, opaque splats on the plane z = wall_depth.
    const double w = 2.0 * spec.wall_half_width, h = 2.0 * spec.wall_half_height;
    const int nx = std::max(1, static_cast<int>(std::lround(std::sqrt(wall * w / h))));
    const int ny = std::max(1, (wall + nx - 1) / nx);
    const double sx = w / nx, sy = h / ny;
    splat::Scene scene;
    scene.reserve(spec.gaussian_count);
    for (int i = 0; i < wall; ++i) {
        const int gx = i % nx, gy = i / nx;
        splat::Gaussian3D g;
        g.id = static_cast<int>(scene.size());
        g.mu = Vec3(-spec.wall_half_width + (gx + 0.5 + rng.uniform(-0.3, 0.3)) * sx,
                    -spec.wall_half_height + (gy + 0.5 + rng.uniform(-0.3, 0.3)) * sy,
                    spec.wall_depth + rng.uniform(-0.02, 0.02));
        g.scale = Vec3(rng.uniform(0.55, 0.8) * sx, rng.uniform(0.55, 0.8) * sy, 0.01);
        g.rotation = yaw_quat(rng.uniform(-0.4, 0.4));
        g.opacity = rng.uniform(0.9, 1.0);
        g.color = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
        scene.push_back(g);
    }
    for (int i = 0; i < fg; ++i) {
        splat::Gaussian3D g;
        g.id = static_cast<int>(scene.size());
        const double z = rng.uniform(0.55, 0.8) * spec.wall_depth;
        g.mu = Vec3(rng.uniform(-0.8, 0.8) * spec.wall_half_width * z / spec.wall_depth,
                    rng.uniform(-0.8, 0.8) * spec.wall_half_height * z / spec.wall_depth, z);
        g.scale = Vec3(rng.uniform(0.05, 0.12), rng.uniform(0.05, 0.12), rng.uniform(0.05, 0.12));
        Vec4 q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
        g.rotation = q / q.norm();
        g.opacity = rng.uniform(0.6, 1.0);
        g.color = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
        scene.push_back(g);
    }
    return scene;
}

std::vector<Pose> synthetic_trajectory(const SyntheticSpec& spec) {
    std::vector<Pose> poses;
    poses.reserve(spec.frames);
    Rng rng(mix_seed(spec.seed, 0x7a7));
    const double px_world = spec.wall_depth / spec.fx;  // world length of one pixel on the wall
    const double px_angle = 1.0 / spec.fx;
    Vec3 walk_c = Vec3::Zero();
    Mat3 walk_r = Mat3::Identity();
    for (int k = 0; k < spec.frames; ++k) {
        switch (spec.trajectory) {
            case TrajectoryKind::kStatic:
                poses.push_back(Pose::identity());
                break;
            case TrajectoryKind::kPan:
                poses.push_back(look_from(Vec3(k * spec.step_px * px_world, 0, 0), Mat3::Identity()));
                break;
            case TrajectoryKind::kOrbit: {
                // Circle around the wall centre; the camera keeps facing it.
                const double a = k * spec.step_px * px_angle;
                const Mat3 r = so3_exp(Vec3(0, -a, 0));
                const Vec3 pivot(0, 0, spec.wall_depth);
                poses.push_back(look_from(pivot + r * Vec3(0, 0, -spec.wall_depth), r));
                break;
            }
            case TrajectoryKind::kRandomWalk:
                if (k > 0) {
                    walk_c += spec.step_px * px_world * Vec3(rng.normal(), rng.normal(), 0.3 * rng.normal());
                    walk_r = so3_exp(0.3 * spec.step_px * px_angle * Vec3(rng.normal(), rng.normal(), rng.normal())) *
                             walk_r;
                }
                poses.push_back(look_from(walk_c, walk_r));
                break;
            case TrajectoryKind::kRandomJump: {
                if (k == 0) {
                    poses.push_back(Pose::identity());
                    break;
                }
                // Redraw until the wall point at the previous image centre
                // lands far from the new image centre.
                const double j = spec.jump_translation, a = spec.jump_rotation;
                const Vec3 anchor = poses.back().inverse().transform(Vec3(0, 0, spec.wall_depth));
                Pose p;
                for (int attempt = 0; attempt < 1000; ++attempt) {
                    const Vec3 c(rng.uniform(-j, j), rng.uniform(-0.6 * j, 0.6 * j), rng.uniform(-0.3 * j, 0.3 * j));
                    p = look_from(c, euler(rng.uniform(-a, a), rng.uniform(-a, a), rng.uniform(-a, a)));
                    const Vec3 q = p.transform(anchor);
                    const double du = spec.fx * q.x() / q.z(), dv = spec.fy * q.y() / q.z();
                    if (std::hypot(du, dv) >= spec.min_jump_px) break;
                }
                poses.push_back(p);
                break;
            }
        }
    }
    return poses;
}

Frame render_synthetic_frame(const splat::Scene& gaussians, const Pose& pose, const splat::CameraIntrinsics& intr,
                             int id, double noise, std::uint64_t seed) {
    splat::RenderOptions opt;
    const splat::RenderResult r = splat::render_frame(gaussians, pose, intr, opt);
    Frame f;
    f.id = id;
    f.timestamp = id / 30.0;
    f.rgb = r.color;
    f.depth = ImageDepth(intr.width, intr.height, 0.0);
    for (std::size_t i = 0; i < f.depth.size(); ++i) {
        if (1.0 - r.aux.final_T.data[i] >= 0.5) f.depth.data[i] = r.depth.data[i];
    }
    if (noise > 0.0) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(id) + 1));
        for (auto& c : f.rgb.data) {
            for (int ch = 0; ch < 3; ++ch) c[ch] = std::clamp(c[ch] + noise * rng.normal(), 0.0, 1.0);
        }
    }
    f.gt_pose = pose;
    return f;
}

SyntheticScene generate_synthetic(const SyntheticSpec& spec) {
    SyntheticScene s;
    s.spec = spec;
    s.intr = synthetic_intrinsics(spec);
    s.gaussians = synthetic_gaussians(spec);
    s.trajectory = synthetic_trajectory(spec);
    s.frames.reserve(s.trajectory.size());
    for (int k = 0; k < static_cast<int>(s.trajectory.size()); ++k) {
        s.frames.push_back(render_synthetic_frame(s.gaussians, s.trajectory[k], s.intr, k, spec.noise, spec.seed));
    }
    return s;
}

}  // namespace ags::harness
