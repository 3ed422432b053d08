#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ags/harness/config.hpp"
#include "ags/sim/stats.hpp"
#include "ags/sim/workload.hpp"

namespace ags::harness {

// Input frames with ground truth and the camera they were taken with.
struct Sequence {
    splat::CameraIntrinsics intr;
    std::vector<Frame> frames;  // gt_pose always set
    std::string units;          // trajectory units, "m" for TUM
};

// Throws on unreadable input or an empty frame range.
Sequence load_sequence(const ExperimentConfig& cfg);

struct FrameRow {
    int frame = 0;
    double fc = 0.0;  // to the previous frame
    int level = 1;
    bool refined = false;
    int refine_iters = 0;
    bool key = true;
    double fc_to_key = 0.0;
    std::size_t skip_size = 0;
    std::optional<double> fp_rate;      // count rule; non-key frames with a skip set
    std::optional<double> fp_rate_any;  // any-pixel rule
    double track_loss = 0.0;
    double map_loss = 0.0;
    std::size_t gaussians = 0;
    double psnr = 0.0;  // final map at the estimated pose
    Vec3 position = Vec3::Zero();  // estimated camera centre
    Vec3 gt_position = Vec3::Zero();
    std::uint64_t tracking_cycles = 0;
    std::uint64_t mapping_cycles = 0;

    bool operator==(const FrameRow&) const = default;
};

struct ModeReport {
    std::string mode;  // baseline | ags
    std::vector<FrameRow> rows;
    double ate_rmse = 0.0;
    double psnr = 0.0;  // mean of the finite per-frame values
    std::optional<double> fp_rate;
    std::optional<double> fp_rate_any;
    double refine_fraction = 0.0;
    double key_fraction = 0.0;
    double skip_fraction = 0.0;  // mean of skip-set size / map size over non-key frames
    sim::SimStats sim;
    double energy = 0.0;

    bool operator==(const ModeReport&) const = default;
};

struct RunReport {
    std::string config;  // save_config text of the run
    std::string units;
    std::string preset;
    std::optional<ModeReport> baseline;
    std::optional<ModeReport> ags;
    std::optional<double> speedup;  // baseline cycles / AGS cycles

    bool operator==(const RunReport&) const = default;
};

enum class Mode { kBaseline, kAgs };

struct ModeRun {
    ModeReport report;
    std::vector<sim::FrameTask> tasks;
    std::vector<Pose> poses;  // estimated, world-to-camera
};

// One functional SLAM pass plus its simulation. Baseline: constant-velocity
// initialisation and baseline_iters refinement steps on every frame, full
// mapping on every frame, serialized schedule, scheduler off. AGS:
// covisibility-gated tracking and mapping, pipelined schedule, scheduler on.
ModeRun run_mode(const Sequence& seq, const ExperimentConfig& cfg, Mode mode);

struct RunOptions {
    bool baseline = true;
    bool ags = true;
};

RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

// Assembles the report of already finished runs; either may be null.
RunReport make_run_report(const ExperimentConfig& cfg, const Sequence& seq, const ModeRun* baseline,
                          const ModeRun* ags);

// Recomputes the row-derived aggregates of `report`; sim fields are copied.
ModeReport recompute_aggregates(const ModeReport& report);

// MACs charged to one coarse estimate over `blocks` motion vectors.
std::uint64_t coarse_mac_count(std::size_t blocks);

// Block search against the model frame plus its pose estimate.
std::uint64_t align_mac_count(std::size_t blocks, const codec::MotionConfig& motion);

}  // namespace ags::harness
