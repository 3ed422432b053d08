#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "ags/codec/covisibility.hpp"
#include "ags/splat/optimize.hpp"

namespace ags::mapping {

// round(450 * W*H / (640*480)): the full-resolution count threshold scaled
// to the image area.
int desk_thresh_n(int width, int height);

// Step sizes for the per-pixel-mean loss at desk resolution. The loss
// gradient of a single pixel is O(1/(W*H)), so these are 100x the rates
// usually quoted for summed losses.
inline splat::LearningRates desk_mapping_rates() {
    splat::LearningRates lr;
    lr.mu = 0.1;
    lr.color = 2.5;
    lr.opacity = 5.0;
    lr.scale = 0.1;
    lr.rotation = 0.1;
    return lr;
}

struct MappingConfig {
    double thresh_m = 0.50;
    double thresh_alpha = 1.0 / 255.0;
    int thresh_n = desk_thresh_n(96, 64);
    int n_m = 30;
    // Selective mapping drops the loss on pixels where a skipped Gaussian's
    // alpha reaches mask_alpha. Values above 1 disable the mask.
    double mask_alpha = 1.0 / 255.0;
    int keyframe_window = 2;
    double lambda_depth = splat::kDefaultDepthWeight;
    splat::LearningRates lr = desk_mapping_rates();
    splat::DensifyOptions densify;
    codec::MotionConfig motion;
    Exec exec = Exec::kParallel;
    std::uint64_t seed = 1;
};

// Per-Gaussian count of evaluated pixels whose alpha fell below thresh_alpha.
struct ContributionRecord {
    int key_frame_id = -1;
    std::map<int, std::uint32_t> counts;  // gaussian id -> count

    bool operator==(const ContributionRecord&) const = default;
};

using SkipSet = std::set<int>;

enum class FrameClass { kKey, kNonKey };

const char* to_string(FrameClass c);

// Non-key iff the covisibility with the last key frame exceeds thresh_m.
FrameClass classify_fc(double fc_to_last_key, const MappingConfig& cfg);
FrameClass classify_frame(const Frame& cur, const Frame* last_key, const MappingConfig& cfg);

ContributionRecord record_contributions(const splat::RenderAux& aux, int key_frame_id, const MappingConfig& cfg);

SkipSet build_skip_set(const ContributionRecord& record, int thresh_n);

// Marks Gaussians of `scene` whose id is in `skip`. Empty when nothing is
// skipped, so callers can pass it straight to the renderer.
std::vector<std::uint8_t> exclusion_mask(const splat::Scene& scene, const SkipSet& skip);

// Pixels inside the support box of at least one excluded Gaussian whose
// alpha there is at least `min_alpha`. Selective mapping passes mask_alpha
// and leaves these pixels out of the loss, so the retained Gaussians are not
// pulled into the holes the skipped ones leave behind.
ImageLuma skip_footprint(const splat::Scene& scene, std::span<const std::uint8_t> exclude, const Pose& pose,
                         const splat::CameraIntrinsics& intr, double min_alpha = 0.0);

struct Keyframe {
    Frame frame;
    Pose pose;
};

// Work done by one mapping call, for the simulator and the reports.
struct MappingWork {
    int iterations = 0;
    int densified = 0;
    std::size_t skipped = 0;
    std::size_t frame_renders = 0;  // renders across all iterations and frames
    std::optional<splat::RenderResult> last_render;  // current frame, final iteration
    double loss_before = 0.0;
    double loss_after = 0.0;  // current-frame loss on the final iteration
};

struct FullMappingResult {
    splat::Scene scene;
    ContributionRecord record;
    MappingWork work;
};

// Densify, then n_m descent steps on the current frame plus up to
// keyframe_window sampled past keyframes. Gaussians flagged in `exclude`
// (indexed like `scene`) are left out of every render and untouched.
FullMappingResult full_mapping(const Frame& frame, const Pose& pose, const splat::Scene& scene,
                               const std::vector<Keyframe>& keyframes, const splat::CameraIntrinsics& intr,
                               const MappingConfig& cfg);

struct SelectiveMappingResult {
    splat::Scene scene;
    MappingWork work;
};

SelectiveMappingResult selective_mapping(const Frame& frame, const Pose& pose, const splat::Scene& scene,
                                         const SkipSet& skip, const std::vector<Keyframe>& keyframes,
                                         const splat::CameraIntrinsics& intr, const MappingConfig& cfg);

struct MappingState {
    splat::Scene scene;
    std::vector<Keyframe> keyframes;
    std::optional<Frame> last_key;
    ContributionRecord record;
    SkipSet skip;
};

struct MapFrameResult {
    FrameClass cls = FrameClass::kKey;
    double fc_to_key = 0.0;
    std::size_t skip_size = 0;
    MappingWork work;
};

// Classifies the frame against the last key frame and runs full or
// selective mapping. `force_key` treats every frame as key (ungated mode).
MapFrameResult map_frame(const Frame& frame, const Pose& pose, MappingState& state,
                         const splat::CameraIntrinsics& intr, const MappingConfig& cfg, bool force_key = false);

enum class FalsePositiveRule {
    kAnyPixel,  // skipped Gaussian has any pixel with alpha >= thresh_alpha
    kCount,     // ... and at most thresh_n sub-threshold pixels
};

struct FalsePositiveStats {
    std::size_t skipped = 0;
    std::size_t any_pixel = 0;
    std::size_t count_rule = 0;

    double rate(FalsePositiveRule rule) const;
};

FalsePositiveStats false_positive_stats(const splat::Scene& scene, const Frame& frame, const Pose& pose,
                                        const SkipSet& skip, const splat::CameraIntrinsics& intr,
                                        const MappingConfig& cfg);

double false_positive_rate(const splat::Scene& scene, const Frame& frame, const Pose& pose, const SkipSet& skip,
                           const splat::CameraIntrinsics& intr, const MappingConfig& cfg,
                           FalsePositiveRule rule = FalsePositiveRule::kAnyPixel);

}  // namespace ags::mapping
