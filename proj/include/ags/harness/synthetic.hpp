#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ags/splat/gaussian.hpp"
#include "ags/common/image.hpp"

namespace ags::harness {

enum class TrajectoryKind { kStatic, kPan, kOrbit, kRandomWalk, kRandomJump };

std::string to_string(TrajectoryKind kind);
std::optional<TrajectoryKind> trajectory_from_string(const std::string& name);

struct SyntheticSpec {
    int width = 96;
    int height = 64;
    double fx = 80.0;
    double fy = 80.0;
    double cx = 48.0;
    double cy = 32.0;
    int gaussian_count = 2000;
    double foreground_fraction = 0.01;
    double wall_depth = 3.0;
    double wall_half_width = 3.2;
    double wall_half_height = 2.4;
    int frames = 30;
    TrajectoryKind trajectory = TrajectoryKind::kPan;
    double step_px = 1.0;  // image-plane motion per frame at the wall
    double jump_translation = 0.6;
    double jump_rotation = 0.15;
    double min_jump_px = 20.0;  // consecutive random jumps move the view at least this far
    double noise = 0.0;  // std-dev of additive colour noise
    std::uint64_t seed = 1;
};

struct SyntheticScene {
    SyntheticSpec spec;
    splat::CameraIntrinsics intr;
    splat::Scene gaussians;
    std::vector<Pose> trajectory;
    std::vector<Frame> frames;
};

splat::CameraIntrinsics synthetic_intrinsics(const SyntheticSpec& spec);
splat::Scene synthetic_gaussians(const SyntheticSpec& spec);
std::vector<Pose> synthetic_trajectory(const SyntheticSpec& spec);

// Renders one ground-truth frame. Depth is the blended depth where the
// rendered coverage (1 - T) is at least 0.5 and 0 elsewhere.
Frame render_synthetic_frame(const splat::Scene& gaussians, const Pose& pose, const splat::CameraIntrinsics& intr,
                             int id, double noise, std::uint64_t seed);

SyntheticScene generate_synthetic(const SyntheticSpec& spec);

}  // namespace ags::harness
