// Serial reference against the OpenMP path for the three hot kernels.
#include <benchmark/benchmark.h>

#include "ags/codec/motion.hpp"
#include "ags/harness/synthetic.hpp"
#include "ags/splat/gradients.hpp"

using namespace ags;

namespace {

const harness::SyntheticScene& scene() {
    static const harness::SyntheticScene s = [] {
        harness::SyntheticSpec spec;
        spec.frames = 2;
        spec.step_px = 2.0;
        return harness::generate_synthetic(spec);
    }();
    return s;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::kParallel : Exec::kSerial; }

void BM_Render(benchmark::State& state) {
    const auto& s = scene();
    splat::RenderOptions opt;
    opt.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(splat::render_frame(s.gaussians, s.trajectory[0], s.intr, opt));
}

void BM_LossAndGradients(benchmark::State& state) {
    const auto& s = scene();
    splat::GradientOptions opt;
    opt.render.exec = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(splat::loss_and_gradients(s.gaussians, s.trajectory[0], s.intr, s.frames[0], opt));
    }
}

void BM_MotionField(benchmark::State& state) {
    const auto& s = scene();
    const ImageLuma cur = codec::to_luma(s.frames[1].rgb), prev = codec::to_luma(s.frames[0].rgb);
    codec::MotionConfig cfg;
    cfg.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(codec::motion_field(cur, prev, cfg));
}

}  // namespace

BENCHMARK(BM_Render)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LossAndGradients)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MotionField)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
