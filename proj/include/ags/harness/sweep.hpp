#pragma once

#include <string>
#include <vector>

#include "ags/harness/experiment.hpp"

namespace ags::harness {

struct SweepOptions {
    std::vector<int> iter_t = {5, 10, 20, 40};
    std::vector<double> thresh_m = {0.3, 0.5, 0.7, 0.9};
    std::vector<double> thresh_n_factor = {0.25, 0.5, 1.0, 2.0};  // times the configured thresh_n
};

struct SweepPoint {
    std::string param;  // iter_t | thresh_m | thresh_n
    double value = 0.0;
    double psnr = 0.0;
    double ate_rmse = 0.0;
    double speedup = 0.0;
    std::uint64_t cycles = 0;
    double refine_fraction = 0.0;
    double key_fraction = 0.0;
    double skip_fraction = 0.0;
    std::optional<double> fp_rate;

    // Higher is better: -ATE for iter_t, PSNR for the mapping thresholds.
    double quality() const { return param == "iter_t" ? -ate_rmse : psnr; }
};

struct SweepResult {
    std::uint64_t baseline_cycles = 0;
    std::vector<SweepPoint> points;  // grouped by param, in option order
};

// Runs the baseline once and AGS once per point, varying one parameter at a
// time from `cfg`.
SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& options = {});

std::string sweep_csv(const SweepResult& result);

struct SweepCheck {
    std::string param;
    int quality_inversions = 0;  // steps where quality drops as the value grows
    int savings_inversions = 0;  // steps where speedup rises as the value grows
    int inversions() const { return quality_inversions + savings_inversions; }
};

// One entry per swept parameter, in the order they appear.
std::vector<SweepCheck> check_sweep(const SweepResult& result);

}  // namespace ags::harness
