// Command-line front end: synth, covis, run, simulate, eval, sweep, config.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ags/codec/covisibility.hpp"
#include "ags/harness/config.hpp"
#include "ags/harness/experiment.hpp"
#include "ags/harness/metrics.hpp"
#include "ags/harness/report.hpp"
#include "ags/harness/sweep.hpp"
#include "ags/harness/synthetic.hpp"
#include "ags/harness/tum.hpp"
#include "ags/sim/trace.hpp"

namespace fs = std::filesystem;
using namespace ags;
using namespace ags::harness;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<StampedPose> stamped(const Sequence& seq, const std::vector<Pose>& poses) {
    std::vector<StampedPose> out;
    for (std::size_t i = 0; i < poses.size(); ++i) out.push_back({seq.frames[i].timestamp, poses[i]});
    return out;
}

void print_mode(const ModeReport& m, const std::string& units) {
    std::printf("%-8s  ATE %.4f %s  PSNR %.2f dB  refine %.0f%%  key %.0f%%  cycles %llu  util %.3f\n",
                m.mode.c_str(), m.ate_rmse * (units == "m" ? 100.0 : 1.0), units == "m" ? "cm" : units.c_str(),
                m.psnr, 100.0 * m.refine_fraction, 100.0 * m.key_fraction,
                static_cast<unsigned long long>(m.sim.total_cycles), m.sim.utilization());
}

int cmd_synth(const ExperimentConfig& cfg, const std::string& out_dir) {
    const SyntheticScene scene = generate_synthetic(cfg.synthetic);
    const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) / "synth" : fs::path(out_dir);
    export_tum_rgbd(dir, scene.frames);
    std::printf("wrote %zu frames (%zu gaussians, %s trajectory) to %s\n", scene.frames.size(),
                scene.gaussians.size(), to_string(cfg.synthetic.trajectory).c_str(), dir.c_str());
    return 0;
}

int cmd_covis(const ExperimentConfig& cfg, const std::string& out_file) {
    const Sequence seq = load_sequence(cfg);
    std::string csv = "frame,prev,fc,level,total_sad,reference_activity\n";
    for (std::size_t i = 1; i < seq.frames.size(); ++i) {
        const codec::CovisibilityReport r =
            codec::frame_covisibility(seq.frames[i], seq.frames[i - 1], cfg.tracking.motion);
        csv += std::to_string(i) + ',' + std::to_string(i - 1) + ',' + csv_num(r.fc) + ',' + std::to_string(r.level) +
               ',' + std::to_string(r.total_sad) + ',' + std::to_string(r.reference_activity) + '\n';
    }
    if (out_file.empty()) {
        std::cout << csv;
    } else {
        write_text(out_file, csv);
    }
    return 0;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& mode) {
    cfg.validate();
    const Sequence seq = load_sequence(cfg);
    std::optional<ModeRun> baseline, ags;
    if (mode != "ags") baseline = run_mode(seq, cfg, Mode::kBaseline);
    if (mode != "baseline") ags = run_mode(seq, cfg, Mode::kAgs);
    const RunReport report = make_run_report(cfg, seq, baseline ? &*baseline : nullptr, ags ? &*ags : nullptr);

    const fs::path dir = cfg.output_dir;
    emit_report(report, dir);
    std::vector<Pose> gt;
    for (const Frame& f : seq.frames) gt.push_back(*f.gt_pose);
    write_trajectory(dir / "groundtruth.txt", stamped(seq, gt));
    for (const auto* run : {&baseline, &ags}) {
        if (!*run) continue;
        const std::string name = (*run)->report.mode;
        write_trajectory(dir / (name + "_trajectory.txt"), stamped(seq, (*run)->poses));
        std::ofstream trace(dir / (name + "_trace.jsonl"));
        sim::write_trace(trace, (*run)->tasks);
        print_mode((*run)->report, seq.units);
    }
    if (report.speedup) std::printf("speedup  %.2fx (%s preset)\n", *report.speedup, report.preset.c_str());
    std::printf("report written to %s\n", dir.c_str());
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& trace_file, bool scheduler, bool pipelined,
                 const std::string& out_file) {
    std::ifstream in(trace_file);
    if (!in) throw std::runtime_error("cannot read " + trace_file);
    const std::vector<sim::FrameTask> tasks = sim::read_trace(in);
    const sim::PipelineResult r = sim::simulate_pipeline(tasks, cfg.hardware, scheduler, pipelined);
    nlohmann::ordered_json j;
    j["frames"] = tasks.size();
    j["scheduler"] = scheduler;
    j["pipelined"] = pipelined;
    j["pipelined_makespan"] = r.pipelined;
    j["serialized_makespan"] = r.serialized;
    j["stats"] = sim::to_json(r.stats, cfg.hardware);
    const std::string text = j.dump(2) + "\n";
    if (out_file.empty()) {
        std::cout << text;
    } else {
        write_text(out_file, text);
    }
    return 0;
}

int cmd_eval(const std::string& est_file, const std::string& gt_file, const std::string& render_file,
             const std::string& reference_file, double max_dt) {
    if (est_file.empty() == !gt_file.empty()) throw CLI::ValidationError("--est and --gt go together");
    if (render_file.empty() == !reference_file.empty()) throw CLI::ValidationError("--render and --reference go together");
    if (est_file.empty() && render_file.empty()) throw CLI::ValidationError("nothing to evaluate");
    nlohmann::ordered_json j;
    if (!est_file.empty()) {
        const std::vector<StampedPose> est = read_trajectory(est_file);
        const std::vector<StampedPose> gt = read_trajectory(gt_file);
        std::vector<Pose> a, b;
        std::size_t next = 0;
        for (const StampedPose& e : est) {
            while (next + 1 < gt.size() &&
                   std::abs(gt[next + 1].timestamp - e.timestamp) <= std::abs(gt[next].timestamp - e.timestamp)) {
                ++next;
            }
            if (next < gt.size() && std::abs(gt[next].timestamp - e.timestamp) <= max_dt) {
                a.push_back(e.pose);
                b.push_back(gt[next].pose);
            }
        }
        j["matched_poses"] = a.size();
        j["ate_rmse"] = ate_rmse(std::span<const Pose>(a), std::span<const Pose>(b));
    }
    if (!render_file.empty()) {
        const double p = psnr(read_rgb_png(render_file), read_rgb_png(reference_file));
        j["psnr_db"] = std::isfinite(p) ? nlohmann::ordered_json(p) : nlohmann::ordered_json("inf");
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
    const SweepResult r = run_sweep(cfg, options);
    const fs::path path = fs::path(cfg.output_dir) / "sweep.csv";
    write_text(path, sweep_csv(r));
    for (const SweepPoint& p : r.points) {
        std::printf("%-8s %6g  PSNR %.2f  ATE %.4f  speedup %.2fx  refine %.0f%%  key %.0f%%  skip %.0f%%\n",
                    p.param.c_str(), p.value, p.psnr, p.ate_rmse, p.speedup, 100.0 * p.refine_fraction,
                    100.0 * p.key_fraction, 100.0 * p.skip_fraction);
    }
    for (const SweepCheck& c : check_sweep(r)) {
        std::printf("%-8s quality inversions %d, savings inversions %d\n", c.param.c_str(), c.quality_inversions,
                    c.savings_inversions);
    }
    std::printf("sweep written to %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covisibility-gated Gaussian-splatting SLAM: functional runs and accelerator simulation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    app.add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    const auto& keys = config_keys();
    std::vector<std::string> values(keys.size());
    std::vector<CLI::Option*> flags;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        CLI::Option* o = app.add_option("--" + keys[i].name, values[i], keys[i].help);
        if (keys[i].name == "preset") o->check(CLI::IsMember({"edge", "server"}));
        flags.push_back(o);
    }

    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "render the configured synthetic sequence to a TUM-style directory");
    synth->add_option("--out", synth_out, "output directory (default <output_dir>/synth)");

    std::string covis_out;
    auto* covis = app.add_subcommand("covis", "per-frame covisibility of consecutive frames as CSV");
    covis->add_option("--out", covis_out, "CSV file (default stdout)");

    std::string run_mode_name = "both";
    auto* run = app.add_subcommand("run", "baseline and gated runs, reports written to output_dir");
    run->add_option("--mode", run_mode_name, "both, baseline or ags")->check(CLI::IsMember({"both", "baseline", "ags"}));

    std::string trace_file, sim_out;
    bool scheduler = true, pipelined = true;
    auto* simulate = app.add_subcommand("simulate", "replay a JSON-lines trace through the simulator");
    simulate->add_option("--trace", trace_file, "trace written by run")->required()->check(CLI::ExistingFile);
    simulate->add_option("--scheduler", scheduler, "GPE scheduler on (1) or off (0)");
    simulate->add_option("--pipelined", pipelined, "overlap tracking and mapping (1) or serialize (0)");
    simulate->add_option("--out", sim_out, "JSON file (default stdout)");

    std::string est_file, gt_file, render_file, reference_file;
    double max_dt = kTumMaxTimeDifference;
    auto* eval = app.add_subcommand("eval", "ATE of a trajectory and/or PSNR of a render");
    eval->add_option("--est", est_file, "estimated trajectory, TUM format")->check(CLI::ExistingFile);
    eval->add_option("--gt", gt_file, "reference trajectory, TUM format")->check(CLI::ExistingFile);
    eval->add_option("--render", render_file, "rendered PNG")->check(CLI::ExistingFile);
    eval->add_option("--reference", reference_file, "reference PNG")->check(CLI::ExistingFile);
    eval->add_option("--max-dt", max_dt, "timestamp association tolerance in seconds");

    SweepOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "threshold sensitivity sweeps, sweep.csv written to output_dir");
    sweep->add_option("--iter-t-values", sweep_opts.iter_t, "refinement iteration counts")->delimiter(',');
    sweep->add_option("--thresh-m-values", sweep_opts.thresh_m, "key-frame thresholds")->delimiter(',');
    sweep->add_option("--thresh-n-factors", sweep_opts.thresh_n_factor, "multiples of thresh_n")->delimiter(',');

    auto* config = app.add_subcommand("config", "print the effective configuration");

    for (auto* sub : {synth, covis, run, simulate, eval, sweep, config}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        Settings settings;
        if (!config_file.empty()) settings = parse_settings(read_text(config_file));
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (flags[i]->count() > 0) settings.emplace_back(keys[i].name, values[i]);
        }
        ExperimentConfig cfg;
        apply_settings(cfg, settings);
        cfg.validate();

        if (*synth) return cmd_synth(cfg, synth_out);
        if (*covis) return cmd_covis(cfg, covis_out);
        if (*run) return cmd_run(cfg, run_mode_name);
        if (*simulate) return cmd_simulate(cfg, trace_file, scheduler, pipelined, sim_out);
        if (*eval) return cmd_eval(est_file, gt_file, render_file, reference_file, max_dt);
        if (*sweep) return cmd_sweep(cfg, sweep_opts);
        if (*config) {
            std::cout << save_config(cfg);
            return 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
