#include "ags/harness/sweep.hpp"

#include <cmath>
#include <cstdio>

namespace ags::harness {

namespace {

SweepPoint make_point(const std::string& param, double value, const ModeReport& m, std::uint64_t baseline_cycles) {
    SweepPoint p;
    p.param = param;
    p.value = value;
    p.psnr = m.psnr;
    p.ate_rmse = m.ate_rmse;
    p.cycles = m.sim.total_cycles;
    p.speedup = p.cycles ? static_cast<double>(baseline_cycles) / static_cast<double>(p.cycles) : 0.0;
    p.refine_fraction = m.refine_fraction;
    p.key_fraction = m.key_fraction;
    p.skip_fraction = m.skip_fraction;
    p.fp_rate = m.fp_rate;
    return p;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
    cfg.validate();
    const Sequence seq = load_sequence(cfg);
    SweepResult out;
    out.baseline_cycles = run_mode(seq, cfg, Mode::kBaseline).report.sim.total_cycles;

    auto run = [&](const std::string& param, double value, const ExperimentConfig& c) {
        out.points.push_back(make_point(param, value, run_mode(seq, c, Mode::kAgs).report, out.baseline_cycles));
    };
    for (int it : options.iter_t) {
        ExperimentConfig c = cfg;
        c.tracking.iter_t = it;
        run("iter_t", it, c);
    }
    for (double m : options.thresh_m) {
        ExperimentConfig c = cfg;
        c.mapping.thresh_m = m;
        run("thresh_m", m, c);
    }
    const int base_n = effective_thresh_n(cfg, seq.intr.width, seq.intr.height);
    for (double f : options.thresh_n_factor) {
        ExperimentConfig c = cfg;
        c.auto_thresh_n = false;
        c.mapping.thresh_n = static_cast<int>(std::lround(f * base_n));
        run("thresh_n", c.mapping.thresh_n, c);
    }
    return out;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out =
        "param,value,psnr,ate_rmse,speedup,cycles,baseline_cycles,refine_fraction,key_fraction,skip_fraction,fp_rate\n";
    char buf[512];
    for (const SweepPoint& p : result.points) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%llu,%llu,%.17g,%.17g,%.17g,", p.param.c_str(),
                      p.value, p.psnr, p.ate_rmse, p.speedup, static_cast<unsigned long long>(p.cycles),
                      static_cast<unsigned long long>(result.baseline_cycles), p.refine_fraction, p.key_fraction,
                      p.skip_fraction);
        out += buf;
        if (p.fp_rate) {
            std::snprintf(buf, sizeof buf, "%.17g", *p.fp_rate);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::vector<SweepCheck> check_sweep(const SweepResult& result) {
    std::vector<SweepCheck> out;
    const SweepPoint* prev = nullptr;
    for (const SweepPoint& p : result.points) {
        if (out.empty() || out.back().param != p.param) {
            out.push_back({p.param});
            prev = nullptr;
        }
        if (prev) {
            if (p.quality() < prev->quality()) ++out.back().quality_inversions;
            if (p.speedup > prev->speedup) ++out.back().savings_inversions;
        }
        prev = &p;
    }
    return out;
}

}  // namespace ags::harness
