#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ags/codec/covisibility.hpp"
#include "ags/splat/optimize.hpp"

namespace ags::tracking {

struct TrackingConfig {
    double thresh_t = 0.90;
    int iter_t = 20;
    double pose_lr = 2e-3;
    int baseline_iters = 40;  // N_T of the ungated pipeline
    bool model_alignment = true;  // re-align the coarse pose against a render of the map
    double lambda_depth = splat::kDefaultDepthWeight;
    codec::MotionConfig motion;
    Exec exec = Exec::kParallel;
};

// What the tracker remembers between frames.
struct TrackingState {
    bool initialized = false;
    Pose prev_pose;
    Pose prev_delta;  // prev_pose * (pose before it)^-1
    Frame prev_frame;
};

class CoarseEstimator {
public:
    virtual ~CoarseEstimator() = default;
    virtual Pose estimate(const TrackingState& prev, const Frame& cur, std::span<const codec::MotionResult> motion,
                          const splat::CameraIntrinsics& intr) const = 0;
};

// Default estimator: median-gated block motion vectors, back-projected with
// each frame's depth, aligned by orthogonal Procrustes and then refined on
// the reprojection error in the current frame. Falls back to constant
// velocity below three correspondences.
class MotionDepthEstimator final : public CoarseEstimator {
public:
    Pose estimate(const TrackingState& prev, const Frame& cur, std::span<const codec::MotionResult> motion,
                  const splat::CameraIntrinsics& intr) const override;
};

// Constant-velocity extrapolation: prev_delta * prev_pose.
Pose constant_velocity(const TrackingState& prev);

Pose coarse_estimate(const TrackingState& prev, const Frame& cur, std::span<const codec::MotionResult> motion,
                     const splat::CameraIntrinsics& intr);

// A rendering of `scene` at `pose` as a frame: colour, and depth where the
// coverage 1 - T is at least 0.5 (normalised by the coverage).
Frame render_model_frame(const splat::Scene& scene, const Pose& pose, const splat::CameraIntrinsics& intr,
                         Exec exec, splat::RenderResult* render = nullptr);

struct ModelAlignment {
    Pose pose;
    std::size_t blocks = 0;  // block searches against the model frame
    std::optional<splat::RenderResult> render;
};

// One block-matching step of `cur` against the map rendered at `pose`,
// followed by the same pose solve as the coarse estimator. Returns
// `pose` unchanged on an empty scene.
ModelAlignment align_to_model(const Pose& pose, const Frame& cur, const splat::Scene& scene,
                              const splat::CameraIntrinsics& intr, const TrackingConfig& cfg);

struct RefineResult {
    Pose pose;
    double initial_loss = 0.0;
    double best_loss = 0.0;
    int iterations = 0;
    std::optional<splat::RenderResult> last_render;  // render of the final iteration
};

// `iterations` gradient steps on the pose with the scene held fixed; returns
// the pose with the lowest loss seen. No-op on an empty scene.
RefineResult refine_pose(const Pose& pose, const Frame& frame, const splat::Scene& scene,
                         const splat::CameraIntrinsics& intr, const TrackingConfig& cfg, int iterations);

inline RefineResult refine_pose(const Pose& pose, const Frame& frame, const splat::Scene& scene,
                                const splat::CameraIntrinsics& intr, const TrackingConfig& cfg) {
    return refine_pose(pose, frame, scene, intr, cfg, cfg.iter_t);
}

struct TrackResult {
    Pose pose;
    Pose coarse_pose;
    bool used_refinement = false;
    double fc = 0.0;
    int level = 1;
    int iterations = 0;
    double loss = 0.0;
    std::size_t motion_blocks = 0;
    std::size_t model_blocks = 0;  // 0 when no model alignment ran
    std::optional<splat::RenderResult> last_render;
    std::optional<splat::RenderResult> model_render;
};

// Covisibility-gated tracking. The first frame (uninitialised state) keeps
// `initial_pose`, reports fc = 0 and counts as refined. With
// cfg.model_alignment the coarse pose is aligned to the map before the gate
// decides on refinement.
TrackResult track(const Frame& cur, const TrackingState& state, const splat::Scene& scene,
                  const splat::CameraIntrinsics& intr, const TrackingConfig& cfg,
                  const CoarseEstimator& estimator = MotionDepthEstimator{}, const Pose& initial_pose = {});

// Ungated tracking: constant-velocity initialisation followed by
// cfg.baseline_iters refinement steps on every frame.
TrackResult track_baseline(const Frame& cur, const TrackingState& state, const splat::Scene& scene,
                           const splat::CameraIntrinsics& intr, const TrackingConfig& cfg,
                           const Pose& initial_pose = {});

TrackingState advance(const TrackingState& state, const Frame& cur, const Pose& pose);

}  // namespace ags::tracking
