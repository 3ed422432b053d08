#include "ags/mapping/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ags/common/rng.hpp"

namespace ags::mapping {

namespace {

void add_into(std::vector<splat::GaussianGradient>& acc, const std::vector<splat::GaussianGradient>& g) {
    for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i].mu += g[i].mu;
        acc[i].scale += g[i].scale;
        acc[i].rotation += g[i].rotation;
        acc[i].opacity += g[i].opacity;
        acc[i].color += g[i].color;
    }
}

std::vector<std::size_t> sample_keyframes(Rng& rng, std::size_t available, int window) {
    std::vector<std::size_t> idx(available);
    std::iota(idx.begin(), idx.end(), 0);
    const std::size_t k = std::min<std::size_t>(available, window > 0 ? static_cast<std::size_t>(window) : 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(available - i)]);
    idx.resize(k);
    return idx;
}

struct LoopResult {
    splat::Scene scene;
    MappingWork work;
    std::optional<ContributionRecord> record;
};

// Shared body of full and selective mapping.
LoopResult mapping_loop(const Frame& frame, const Pose& pose, const splat::Scene& scene, const SkipSet& skip,
                        const std::vector<Keyframe>& keyframes, const splat::CameraIntrinsics& intr,
                        const MappingConfig& cfg, bool record) {
    LoopResult out;
    splat::RenderOptions ropt;
    ropt.exec = cfg.exec;
    // Coverage for densification always sees the whole map: a skipped
    // Gaussian still occupies its pixels.
    const splat::RenderResult pre = splat::render_frame(scene, pose, intr, ropt);
    out.work.loss_before = splat::photometric_depth_loss(pre.color, pre.depth, frame, cfg.lambda_depth);
    // Skipped Gaussians are frozen, so their footprints are fixed for the
    // whole call. New Gaussians are never skipped.
    const bool masking = !skip.empty() && cfg.mask_alpha <= 1.0;
    std::map<std::size_t, ImageLuma> footprints;
    constexpr std::size_t kCurrent = static_cast<std::size_t>(-1);
    if (masking) footprints.emplace(kCurrent, skip_footprint(scene, exclusion_mask(scene, skip), pose, intr, cfg.mask_alpha));
    // Error-driven densification under the mask would add Gaussians that
    // this call cannot train.
    out.scene = splat::densify(scene, frame, pose, intr, pre.aux, cfg.densify, &pre.color,
                               masking ? &footprints.at(kCurrent) : nullptr);
    out.work.densified = static_cast<int>(out.scene.size() - scene.size());
    out.work.frame_renders = 1;

    splat::GradientOptions gopt;
    gopt.lambda_depth = cfg.lambda_depth;
    gopt.render = ropt;
    gopt.want_pose = false;
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(frame.id)));
    const std::vector<std::uint8_t> mask = exclusion_mask(out.scene, skip);
    out.work.skipped = std::count(mask.begin(), mask.end(), std::uint8_t{1});
    auto ignore_for = [&](std::size_t key, const Pose& p) -> const ImageLuma* {
        if (!masking) return nullptr;
        auto it = footprints.find(key);
        if (it == footprints.end()) it = footprints.emplace(key, skip_footprint(out.scene, mask, p, intr, cfg.mask_alpha)).first;
        return &it->second;
    };
    for (int it = 0; it < cfg.n_m; ++it) {
        gopt.ignore_pixels = ignore_for(kCurrent, pose);
        splat::GradientResult cur = splat::loss_and_gradients(out.scene, pose, intr, frame, gopt, mask);
        std::vector<splat::GaussianGradient> total = std::move(cur.gaussians);
        for (std::size_t k : sample_keyframes(rng, keyframes.size(), cfg.keyframe_window)) {
            gopt.ignore_pixels = ignore_for(k, keyframes[k].pose);
            const auto kf = splat::loss_and_gradients(out.scene, keyframes[k].pose, intr, keyframes[k].frame, gopt, mask);
            add_into(total, kf.gaussians);
            ++out.work.frame_renders;
        }
        ++out.work.frame_renders;
        ++out.work.iterations;
        if (it + 1 == cfg.n_m) {
            out.work.loss_after = cur.loss;
            if (record) out.record = record_contributions(cur.render.aux, frame.id, cfg);
            out.work.last_render = std::move(cur.render);
        }
        out.scene = splat::update_gaussians(out.scene, total, cfg.lr);
    }
    return out;
}

}  // namespace

int desk_thresh_n(int width, int height) {
    return static_cast<int>(std::lround(450.0 * width * height / (640.0 * 480.0)));
}

const char* to_string(FrameClass c) { return c == FrameClass::kKey ? "key" : "non-key"; }

FrameClass classify_fc(double fc_to_last_key, const MappingConfig& cfg) {
    return fc_to_last_key > cfg.thresh_m ? FrameClass::kNonKey : FrameClass::kKey;
}

FrameClass classify_frame(const Frame& cur, const Frame* last_key, const MappingConfig& cfg) {
    if (last_key == nullptr) return FrameClass::kKey;
    return classify_fc(codec::frame_covisibility(cur, *last_key, cfg.motion).fc, cfg);
}

ContributionRecord record_contributions(const splat::RenderAux& aux, int key_frame_id, const MappingConfig& cfg) {
    ContributionRecord rec;
    rec.key_frame_id = key_frame_id;
    for (const auto& tile : aux.tiles) {
        for (const auto& s : tile.samples) {
            std::uint32_t& c = rec.counts[tile.table.entries[s.table_pos].gaussian_id];
            if (s.alpha < cfg.thresh_alpha) ++c;
        }
    }
    return rec;
}

SkipSet build_skip_set(const ContributionRecord& record, int thresh_n) {
    SkipSet skip;
    for (const auto& [id, count] : record.counts) {
        if (static_cast<std::int64_t>(count) > thresh_n) skip.insert(id);
    }
    return skip;
}

ImageLuma skip_footprint(const splat::Scene& scene, std::span<const std::uint8_t> exclude, const Pose& pose,
                         const splat::CameraIntrinsics& intr, double min_alpha) {
    ImageLuma out(intr.width, intr.height, 0);
    if (exclude.empty()) return out;
    std::vector<std::uint8_t> retained(scene.size(), 1);
    for (std::size_t i = 0; i < scene.size(); ++i) retained[i] = exclude[i] ? 0 : 1;
    for (const splat::Gaussian2D& g : splat::project_gaussians(scene, pose, intr, retained)) {
        const int x0 = std::max(0, static_cast<int>(std::ceil(g.mean.x() - g.extent.x())));
        const int x1 = std::min(intr.width - 1, static_cast<int>(std::floor(g.mean.x() + g.extent.x())));
        const int y0 = std::max(0, static_cast<int>(std::ceil(g.mean.y() - g.extent.y())));
        const int y1 = std::min(intr.height - 1, static_cast<int>(std::floor(g.mean.y() + g.extent.y())));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (splat::compute_alpha(g, Vec2(x, y)) >= min_alpha) out(x, y) = 1;
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> exclusion_mask(const splat::Scene& scene, const SkipSet& skip) {
    if (skip.empty()) return {};
    std::vector<std::uint8_t> mask(scene.size(), 0);
    for (std::size_t i = 0; i < scene.size(); ++i) mask[i] = skip.count(scene[i].id) ? 1 : 0;
    return mask;
}

FullMappingResult full_mapping(const Frame& frame, const Pose& pose, const splat::Scene& scene,
                               const std::vector<Keyframe>& keyframes, const splat::CameraIntrinsics& intr,
                               const MappingConfig& cfg) {
    LoopResult r = mapping_loop(frame, pose, scene, {}, keyframes, intr, cfg, true);
    FullMappingResult out{std::move(r.scene), r.record.value_or(ContributionRecord{frame.id, {}}), std::move(r.work)};
    return out;
}

SelectiveMappingResult selective_mapping(const Frame& frame, const Pose& pose, const splat::Scene& scene,
                                         const SkipSet& skip, const std::vector<Keyframe>& keyframes,
                                         const splat::CameraIntrinsics& intr, const MappingConfig& cfg) {
    LoopResult r = mapping_loop(frame, pose, scene, skip, keyframes, intr, cfg, false);
    return {std::move(r.scene), std::move(r.work)};
}

MapFrameResult map_frame(const Frame& frame, const Pose& pose, MappingState& state,
                         const splat::CameraIntrinsics& intr, const MappingConfig& cfg, bool force_key) {
    MapFrameResult out;
    if (state.last_key && !force_key) {
        out.fc_to_key = codec::frame_covisibility(frame, *state.last_key, cfg.motion).fc;
        out.cls = classify_fc(out.fc_to_key, cfg);
    }
    if (out.cls == FrameClass::kKey) {
        FullMappingResult r = full_mapping(frame, pose, state.scene, state.keyframes, intr, cfg);
        state.scene = std::move(r.scene);
        state.record = std::move(r.record);
        state.skip = build_skip_set(state.record, cfg.thresh_n);
        state.last_key = frame;
        state.keyframes.push_back({frame, pose});
        out.work = std::move(r.work);
    } else {
        SelectiveMappingResult r = selective_mapping(frame, pose, state.scene, state.skip, state.keyframes, intr, cfg);
        state.scene = std::move(r.scene);
        out.work = std::move(r.work);
    }
    out.skip_size = state.skip.size();
    return out;
}

double FalsePositiveStats::rate(FalsePositiveRule rule) const {
    if (skipped == 0) return 0.0;
    const std::size_t fp = rule == FalsePositiveRule::kAnyPixel ? any_pixel : count_rule;
    return static_cast<double>(fp) / static_cast<double>(skipped);
}

FalsePositiveStats false_positive_stats(const splat::Scene& scene, const Frame& frame, const Pose& pose,
                                        const SkipSet& skip, const splat::CameraIntrinsics& intr,
                                        const MappingConfig& cfg) {
    if (frame.rgb.width != intr.width || frame.rgb.height != intr.height) {
        throw std::invalid_argument("false_positive_stats: frame does not match the intrinsics");
    }
    FalsePositiveStats st;
    st.skipped = skip.size();
    if (skip.empty()) return st;
    splat::RenderOptions ropt;
    ropt.exec = cfg.exec;
    const splat::RenderResult r = splat::render_frame(scene, pose, intr, ropt);
    std::map<int, std::uint32_t> low;
    std::set<int> contributes;
    for (const auto& tile : r.aux.tiles) {
        for (const auto& s : tile.samples) {
            const int id = tile.table.entries[s.table_pos].gaussian_id;
            if (!skip.count(id)) continue;
            if (s.alpha >= cfg.thresh_alpha) {
                contributes.insert(id);
            } else {
                ++low[id];
            }
        }
    }
    st.any_pixel = contributes.size();
    for (int id : contributes) {
        if (static_cast<std::int64_t>(low[id]) <= cfg.thresh_n) ++st.count_rule;
    }
    return st;
}

double false_positive_rate(const splat::Scene& scene, const Frame& frame, const Pose& pose, const SkipSet& skip,
                           const splat::CameraIntrinsics& intr, const MappingConfig& cfg, FalsePositiveRule rule) {
    return false_positive_stats(scene, frame, pose, skip, intr, cfg).rate(rule);
}

}  // namespace ags::mapping
