#include "ags/harness/experiment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ags/harness/capture.hpp"
#include "ags/harness/metrics.hpp"
#include "ags/harness/tum.hpp"

namespace ags::harness {

namespace {

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::uint64_t coarse_mac_count(std::size_t blocks) { return 32 * static_cast<std::uint64_t>(blocks) + 512; }

std::uint64_t align_mac_count(std::size_t blocks, const codec::MotionConfig& motion) {
    const auto side = static_cast<std::uint64_t>(2 * motion.search_radius + 1);
    const auto pixels = static_cast<std::uint64_t>(motion.block_size) * motion.block_size;
    return static_cast<std::uint64_t>(blocks) * side * side * pixels + coarse_mac_count(blocks);
}

Sequence load_sequence(const ExperimentConfig& cfg) {
    Sequence seq;
    std::vector<Frame> frames;
    if (cfg.dataset == "synthetic") {
        SyntheticScene s = generate_synthetic(cfg.synthetic);
        seq.intr = s.intr;
        seq.units = "scene units";
        frames = std::move(s.frames);
    } else if (cfg.dataset == "tum") {
        TumSequence t = load_tum_rgbd(cfg.tum_dir);
        const int d = cfg.tum_downsample;
        for (Frame& f : t.frames) frames.push_back(downsample(f, d));
        if (frames.empty()) throw std::runtime_error("no associated frames in " + cfg.tum_dir);
        seq.intr.width = frames.front().rgb.width;
        seq.intr.height = frames.front().rgb.height;
        seq.intr.fx = cfg.synthetic.fx / d;
        seq.intr.fy = cfg.synthetic.fy / d;
        seq.intr.cx = (cfg.synthetic.cx + 0.5) / d - 0.5;
        seq.intr.cy = (cfg.synthetic.cy + 0.5) / d - 0.5;
        seq.units = "m";
    } else {
        throw std::invalid_argument("unknown dataset '" + cfg.dataset + "'");
    }
    const std::size_t start = static_cast<std::size_t>(cfg.frame_start);
    std::size_t end = frames.size();
    if (cfg.frame_count > 0) end = std::min(end, start + static_cast<std::size_t>(cfg.frame_count));
    if (start >= end) throw std::invalid_argument("frame range selects no frames");
    for (std::size_t i = start; i < end; ++i) {
        Frame f = std::move(frames[i]);
        f.id = static_cast<int>(i - start);
        if (!f.gt_pose) f.gt_pose = Pose{};
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

ModeReport recompute_aggregates(const ModeReport& in) {
    ModeReport out = in;
    const std::size_t n = in.rows.size();
    std::vector<Vec3> est, gt;
    std::vector<double> psnrs, fps, fps_any, skip_share;
    std::size_t refined = 0, keys = 0;
    for (const FrameRow& r : in.rows) {
        est.push_back(r.position);
        gt.push_back(r.gt_position);
        if (std::isfinite(r.psnr)) psnrs.push_back(r.psnr);
        if (r.fp_rate) fps.push_back(*r.fp_rate);
        if (r.fp_rate_any) fps_any.push_back(*r.fp_rate_any);
        if (!r.key && r.gaussians > 0) skip_share.push_back(static_cast<double>(r.skip_size) / r.gaussians);
        refined += r.refined ? 1 : 0;
        keys += r.key ? 1 : 0;
    }
    out.ate_rmse = n >= 2 ? ate_rmse(std::span<const Vec3>(est), std::span<const Vec3>(gt)) : 0.0;
    out.psnr = psnrs.empty() && n ? std::numeric_limits<double>::infinity() : mean(psnrs);
    out.fp_rate = fps.empty() ? std::nullopt : std::optional<double>(mean(fps));
    out.fp_rate_any = fps_any.empty() ? std::nullopt : std::optional<double>(mean(fps_any));
    out.refine_fraction = n ? static_cast<double>(refined) / n : 0.0;
    out.key_fraction = n ? static_cast<double>(keys) / n : 0.0;
    out.skip_fraction = mean(skip_share);
    return out;
}

ModeRun run_mode(const Sequence& seq, const ExperimentConfig& cfg, Mode mode) {
    const bool ags = mode == Mode::kAgs;
    const splat::CameraIntrinsics& intr = seq.intr;
    mapping::MappingConfig mcfg = cfg.mapping;
    mcfg.thresh_n = effective_thresh_n(cfg, intr.width, intr.height);
    const tracking::TrackingConfig& tcfg = cfg.tracking;
    const int bs = tcfg.motion.block_size;
    const auto blocks = static_cast<std::uint32_t>(((intr.width + bs - 1) / bs) * ((intr.height + bs - 1) / bs));

    ModeRun out;
    out.report.mode = ags ? "ags" : "baseline";
    tracking::TrackingState ts;
    mapping::MappingState ms;
    std::vector<Pose> estimated;
    const Pose start = *seq.frames.front().gt_pose;
    const tracking::MotionDepthEstimator estimator;

    for (const Frame& cur : seq.frames) {
        const bool first = !ts.initialized;
        tracking::TrackResult tr = ags ? tracking::track(cur, ts, ms.scene, intr, tcfg, estimator, start)
                                       : tracking::track_baseline(cur, ts, ms.scene, intr, tcfg, start);
        ts = tracking::advance(ts, cur, tr.pose);
        const bool had_key = ms.last_key.has_value();
        const mapping::MapFrameResult mr = mapping::map_frame(cur, tr.pose, ms, intr, mcfg, !ags);
        const bool key = mr.cls == mapping::FrameClass::kKey;

        FrameRow row;
        row.frame = cur.id;
        row.fc = tr.fc;
        row.level = tr.level;
        row.refined = tr.used_refinement;
        row.refine_iters = tr.iterations;
        row.key = key;
        row.fc_to_key = mr.fc_to_key;
        row.skip_size = key ? 0 : mr.skip_size;
        row.track_loss = tr.loss;
        row.map_loss = mr.work.loss_after;
        row.gaussians = ms.scene.size();
        if (ags && !key && !ms.skip.empty()) {
            const auto fp = mapping::false_positive_stats(ms.scene, cur, tr.pose, ms.skip, intr, mcfg);
            row.fp_rate = fp.rate(mapping::FalsePositiveRule::kCount);
            row.fp_rate_any = fp.rate(mapping::FalsePositiveRule::kAnyPixel);
        }
        out.report.rows.push_back(row);
        estimated.push_back(tr.pose);

        sim::FrameTask task;
        task.frame = cur.id;
        if (ags) task.covis_blocks = (first ? 0 : blocks) + (had_key ? blocks : 0);
        task.coarse = ags && !first;
        task.coarse_macs = task.coarse ? coarse_mac_count(tr.motion_blocks) : 0;
        if (tr.model_render) {
            task.align_macs = align_mac_count(tr.model_blocks, tcfg.motion);
            task.align_render = render_work(*tr.model_render, false, mcfg.thresh_alpha);
        }
        task.refine_iters = tr.iterations;
        if (tr.last_render) task.track_render = render_work(*tr.last_render, false, mcfg.thresh_alpha);
        task.map_passes = static_cast<int>(mr.work.frame_renders);
        if (mr.work.last_render) task.map_render = render_work(*mr.work.last_render, ags && key, mcfg.thresh_alpha);
        task.log_contributions = ags && key;
        task.skip_records = ags && !key ? ms.record.counts.size() : 0;
        out.tasks.push_back(std::move(task));
    }

    splat::RenderOptions ropt;
    ropt.exec = cfg.exec;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        FrameRow& row = out.report.rows[i];
        row.psnr = psnr(splat::render_frame(ms.scene, estimated[i], intr, ropt).color, seq.frames[i].rgb);
        row.position = estimated[i].center();
        row.gt_position = seq.frames[i].gt_pose->center();
    }

    const sim::PipelineResult pr = sim::simulate_pipeline(out.tasks, cfg.hardware, ags, ags);
    for (std::size_t i = 0; i < pr.frames.size(); ++i) {
        out.report.rows[i].tracking_cycles = pr.frames[i].tracking;
        out.report.rows[i].mapping_cycles = pr.frames[i].mapping;
    }
    out.report.sim = pr.stats;
    out.report.sim.per_gpe.clear();
    out.report.energy = pr.stats.energy(cfg.hardware.energy);
    out.report = recompute_aggregates(out.report);
    out.poses = std::move(estimated);
    return out;
}

RunReport make_run_report(const ExperimentConfig& cfg, const Sequence& seq, const ModeRun* baseline,
                          const ModeRun* ags) {
    RunReport report;
    report.config = save_config(cfg);
    report.units = seq.units;
    report.preset = cfg.hardware.name;
    if (baseline) report.baseline = baseline->report;
    if (ags) report.ags = ags->report;
    if (report.baseline && report.ags && report.ags->sim.total_cycles > 0) {
        report.speedup = static_cast<double>(report.baseline->sim.total_cycles) /
                         static_cast<double>(report.ags->sim.total_cycles);
    }
    return report;
}

RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    const Sequence seq = load_sequence(cfg);
    std::optional<ModeRun> baseline, ags;
    if (options.baseline) baseline = run_mode(seq, cfg, Mode::kBaseline);
    if (options.ags) ags = run_mode(seq, cfg, Mode::kAgs);
    return make_run_report(cfg, seq, baseline ? &*baseline : nullptr, ags ? &*ags : nullptr);
}

}  // namespace ags::harness
