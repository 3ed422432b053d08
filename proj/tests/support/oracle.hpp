#pragma once

// Test-side reference implementations. Nothing here calls into the library's
// projection or blending code.

#include <algorithm>
#include <cmath>
#include <vector>

#include "ags/common/image.hpp"
#include "ags/splat/gaussian.hpp"

namespace ags::oracle {

struct OracleSplat {
    int index = 0;  // into the scene
    int id = 0;
    Vec2 mean;
    Mat2 cov;
    double depth = 0.0;
    double opacity = 0.0;
    Vec3 color;
};

// Pinhole mean and EWA covariance built from Eigen's quaternion rotation.
inline bool oracle_project(const splat::Gaussian3D& g, int index, const Pose& pose,
                           const splat::CameraIntrinsics& intr, OracleSplat& out) {
    const Vec3 p = pose.R * g.mu + pose.t;
    if (p.z() <= 0.01) return false;
    const Eigen::Quaterniond q(g.rotation[0], g.rotation[1], g.rotation[2], g.rotation[3]);
    const Mat3 r = q.normalized().toRotationMatrix();
    Mat3 s = Mat3::Zero();
    for (int k = 0; k < 3; ++k) s(k, k) = g.scale[k] * g.scale[k];
    const Mat3 cov3 = pose.R * (r * s * r.transpose()) * pose.R.transpose();
    Mat23 j;
    j << intr.fx / p.z(), 0.0, -intr.fx * p.x() / (p.z() * p.z()),
         0.0, intr.fy / p.z(), -intr.fy * p.y() / (p.z() * p.z());
    Mat2 cov = j * cov3 * j.transpose();
    cov(0, 1) = cov(1, 0) = 0.5 * (cov(0, 1) + cov(1, 0));
    cov(0, 0) += 0.3;
    cov(1, 1) += 0.3;
    out = {index, g.id, Vec2(intr.fx * p.x() / p.z() + intr.cx, intr.fy * p.y() / p.z() + intr.cy), cov, p.z(),
           g.opacity, g.color};
    return true;
}

inline std::vector<OracleSplat> oracle_sorted_splats(const splat::Scene& scene, const Pose& pose,
                                                     const splat::CameraIntrinsics& intr) {
    std::vector<OracleSplat> splats;
    for (int i = 0; i < static_cast<int>(scene.size()); ++i) {
        OracleSplat s;
        if (oracle_project(scene[i], i, pose, intr, s)) splats.push_back(s);
    }
    std::stable_sort(splats.begin(), splats.end(), [](const OracleSplat& a, const OracleSplat& b) {
        return a.depth < b.depth || (a.depth == b.depth && a.id < b.id);
    });
    return splats;
}

inline double oracle_q(const OracleSplat& s, double x, double y) {
    const Vec2 d(x - s.mean.x(), y - s.mean.y());
    return d.dot(s.cov.inverse() * d);
}

// Pixel inside the 3-sigma bounding box of the splat.
inline bool oracle_in_box(const OracleSplat& s, double x, double y) {
    return std::abs(x - s.mean.x()) <= 3.0 * std::sqrt(s.cov(0, 0)) &&
           std::abs(y - s.mean.y()) <= 3.0 * std::sqrt(s.cov(1, 1));
}

// Discrete choices made while rendering one image: which splats each pixel
// blends (in order), which alphas hit the 0.99 clamp, and the sign of every
// L1 residual.
struct FrozenDecisions {
    struct Step {
        int index;  // scene index
        bool clamped;
    };
    std::vector<std::vector<Step>> pixel_steps;
    std::vector<Vec3> color_sign;
    std::vector<double> depth_sign;
    std::size_t valid_depth = 0;
};


// Brute-force render that also records the discrete decisions.
inline FrozenDecisions oracle_decisions(const splat::Scene& scene, const Pose& pose,
                                        const splat::CameraIntrinsics& intr, const Frame& obs) {
    FrozenDecisions fd;
    const auto splats = oracle_sorted_splats(scene, pose, intr);
    const int n = intr.width * intr.height;
    fd.pixel_steps.resize(n);
    fd.color_sign.resize(n);
    fd.depth_sign.resize(n);
    for (int y = 0; y < intr.height; ++y) {
        for (int x = 0; x < intr.width; ++x) {
            const int pix = y * intr.width + x;
            double t = 1.0;
            Vec3 c = Vec3::Zero();
            double d = 0.0;
            for (const auto& s : splats) {
                if (!oracle_in_box(s, x, y)) continue;
                const double q = oracle_q(s, x, y);
                const double raw = s.opacity * std::exp(-0.5 * q);
                const double a = std::min(raw, 0.99);
                fd.pixel_steps[pix].push_back({s.index, raw > 0.99});
                c += t * a * s.color;
                d += t * a * s.depth;
                t *= 1.0 - a;
                if (t < 1e-4) break;
            }
            const Vec3 rc = c - obs.rgb(x, y);
            for (int k = 0; k < 3; ++k) fd.color_sign[pix][k] = rc[k] > 0 ? 1.0 : (rc[k] < 0 ? -1.0 : 0.0);
            if (obs.depth(x, y) > 0.0) {
                ++fd.valid_depth;
                const double rd = d - obs.depth(x, y);
                fd.depth_sign[pix] = rd > 0 ? 1.0 : (rd < 0 ? -1.0 : 0.0);
            }
        }
    }
    return fd;
}

// Loss of (scene, pose) with every discrete decision held at `fd`. Smooth in
// all continuous parameters, so central differences are meaningful.
inline double frozen_loss(const splat::Scene& scene, const Pose& pose, const splat::CameraIntrinsics& intr,
                          const Frame& obs, const FrozenDecisions& fd, double lambda_depth) {
    std::vector<OracleSplat> by_index(scene.size());
    std::vector<bool> visible(scene.size(), false);
    for (int i = 0; i < static_cast<int>(scene.size()); ++i) visible[i] = oracle_project(scene[i], i, pose, intr, by_index[i]);
    double color_sum = 0.0, depth_sum = 0.0;
    for (int y = 0; y < intr.height; ++y) {
        for (int x = 0; x < intr.width; ++x) {
            const int pix = y * intr.width + x;
            double t = 1.0;
            Vec3 c = Vec3::Zero();
            double d = 0.0;
            for (const auto& step : fd.pixel_steps[pix]) {
                if (!visible[step.index]) continue;
                const OracleSplat& s = by_index[step.index];
                const double a = step.clamped ? 0.99 : s.opacity * std::exp(-0.5 * oracle_q(s, x, y));
                c += t * a * s.color;
                d += t * a * s.depth;
                t *= 1.0 - a;
            }
            color_sum += fd.color_sign[pix].dot(c - obs.rgb(x, y));
            if (obs.depth(x, y) > 0.0) depth_sum += fd.depth_sign[pix] * (d - obs.depth(x, y));
        }
    }
    const double n = intr.width * intr.height;
    return color_sum / n + (fd.valid_depth ? lambda_depth * depth_sum / fd.valid_depth : 0.0);
}

}  // namespace ags::oracle
