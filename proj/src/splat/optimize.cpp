#include "ags/splat/optimize.hpp"

#include <algorithm>

namespace ags::splat {

Scene update_gaussians(const Scene& scene, std::span<const GaussianGradient> grads, const LearningRates& lr) {
    Scene out = scene;
    const std::size_t n = std::min(out.size(), grads.size());
    for (std::size_t i = 0; i < n; ++i) {
        const GaussianGradient& g = grads[i];
        if (g.is_zero()) continue;
        Gaussian3D& p = out[i];
        p.mu -= lr.mu * g.mu;
        p.color = (p.color - lr.color * g.color).cwiseMax(0.0).cwiseMin(1.0);
        p.opacity = std::clamp(p.opacity - lr.opacity * g.opacity, 0.0, 1.0);
        p.scale = (p.scale - lr.scale * g.scale).cwiseMax(kMinScale);
        p.rotation -= lr.rotation * g.rotation;
        p.rotation.normalize();
    }
    return out;
}

Pose update_pose(const Pose& pose, const Vec6& grad, double lr) {
    return Pose::exp(-lr * grad) * pose;
}

Scene densify(const Scene& scene, const Frame& frame, const Pose& pose, const CameraIntrinsics& intr,
              const RenderAux& aux, const DensifyOptions& options, const ImageRGB* rendered,
              const Image<std::uint8_t>* frozen) {
    Scene out = scene;
    int next_id = next_gaussian_id(scene);
    const Pose cam_to_world = pose.inverse();
    const int b = options.block_size;
    for (int by = 0; by < intr.height; by += b) {
        for (int bx = 0; bx < intr.width; bx += b) {
            int best_x = -1, best_y = -1;
            double best_t = options.transmittance_threshold;
            for (int y = by; y < std::min(by + b, intr.height); ++y) {
                for (int x = bx; x < std::min(bx + b, intr.width); ++x) {
                    const double t = aux.final_T(x, y);
                    if (t > best_t && frame.depth(x, y) > 0.0) {
                        best_t = t;
                        best_x = x;
                        best_y = y;
                    }
                }
            }
            if (best_x < 0 && rendered != nullptr && options.color_error_threshold > 0.0) {
                double best_e = options.color_error_threshold;
                for (int y = by; y < std::min(by + b, intr.height); ++y) {
                    for (int x = bx; x < std::min(bx + b, intr.width); ++x) {
                        if (frozen != nullptr && (*frozen)(x, y) != 0) continue;
                        const double e = ((*rendered)(x, y) - frame.rgb(x, y)).cwiseAbs().sum() / 3.0;
                        if (e > best_e && frame.depth(x, y) > 0.0) {
                            best_e = e;
                            best_x = x;
                            best_y = y;
                        }
                    }
                }
            }
            if (best_x < 0) continue;
            const double z = frame.depth(best_x, best_y);
            const Vec3 p_cam((best_x - intr.cx) * z / intr.fx, (best_y - intr.cy) * z / intr.fy, z);
            Gaussian3D g;
            g.id = next_id++;
            g.mu = cam_to_world.transform(p_cam);
            g.scale = Vec3::Constant(std::max(kMinScale, options.scale_factor * z / intr.fx));
            g.opacity = options.opacity;
            g.color = frame.rgb(best_x, best_y).cwiseMax(0.0).cwiseMin(1.0);
            out.push_back(g);
        }
    }
    return out;
}

}  // namespace ags::splat
