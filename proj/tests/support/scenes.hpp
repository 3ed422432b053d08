#pragma once

#include "ags/common/rng.hpp"
#include "ags/splat/gaussian.hpp"

namespace ags::oracle {

inline splat::CameraIntrinsics small_camera(int w, int h) {
    splat::CameraIntrinsics intr;
    intr.width = w;
    intr.height = h;
    intr.fx = intr.fy = 0.9 * w;
    intr.cx = 0.5 * (w - 1);
    intr.cy = 0.5 * (h - 1);
    return intr;
}

inline Vec4 random_unit_quat(Rng& rng) {
    Vec4 q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    return q / q.norm();
}

// Gaussians scattered in the view frustum of an identity camera at depths
// in [1.5, 4].
inline splat::Scene random_scene(Rng& rng, int count, const splat::CameraIntrinsics& intr, double max_opacity = 1.0) {
    splat::Scene scene;
    for (int i = 0; i < count; ++i) {
        splat::Gaussian3D g;
        g.id = static_cast<int>(rng.below(1000)) * 64 + i;
        const double z = rng.uniform(1.5, 4.0);
        const double u = rng.uniform(-0.1 * intr.width, 1.1 * intr.width);
        const double v = rng.uniform(-0.1 * intr.height, 1.1 * intr.height);
        g.mu = Vec3((u - intr.cx) * z / intr.fx, (v - intr.cy) * z / intr.fy, z);
        g.scale = Vec3(rng.uniform(0.03, 0.25), rng.uniform(0.03, 0.25), rng.uniform(0.03, 0.25));
        g.rotation = random_unit_quat(rng);
        g.opacity = rng.uniform(0.2, max_opacity);
        g.color = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
        scene.push_back(g);
    }
    return scene;
}

inline Pose small_random_pose(Rng& rng, double rot = 0.05, double trans = 0.1) {
    Vec6 xi;
    for (int k = 0; k < 3; ++k) xi[k] = rng.uniform(-trans, trans);
    for (int k = 3; k < 6; ++k) xi[k] = rng.uniform(-rot, rot);
    return Pose::exp(xi);
}

}  // namespace ags::oracle
