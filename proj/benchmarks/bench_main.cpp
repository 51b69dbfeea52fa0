#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "tristable/averaging.hpp"
#include "tristable/estimation.hpp"
#include "tristable/orbit.hpp"
#include "tristable/sde.hpp"

using namespace tristable;

namespace {

SpdModel paper_model() {
    SpdModel m;
    m.stiffness = StiffnessParams(1.0, 4.5, 4.0);
    m.damping = {0.1, 0.0};
    m.noise.n1 = {0.01, 0.5};
    return m;
}

void BM_SolveOrbit(benchmark::State& state) {
    const Landscape land = classify_landscape(StiffnessParams(1.0, 4.5, 4.0));
    const double h = land.u1 + std::pow(10.0, -static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_orbit(h, MotionPattern::CrossWell, land));
}
BENCHMARK(BM_SolveOrbit)->Arg(1)->Arg(4)->Arg(8);

void BM_StationaryDensity(benchmark::State& state) {
    const SpdModel m = paper_model();
    const SpdForm form = state.range(0) ? SpdForm::IntegralForm : SpdForm::ClosedForm;
    for (auto _ : state) benchmark::DoNotOptimize(StationaryDensity(m, form).c0());
}
BENCHMARK(BM_StationaryDensity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MarginalX(benchmark::State& state) {
    const StationaryDensity d(paper_model(), SpdForm::ClosedForm);
    const auto edges = BinSpec{-1.6, 1.6, 128}.edges();
    for (auto _ : state) benchmark::DoNotOptimize(d.marginal_x_bins(edges));
}
BENCHMARK(BM_MarginalX)->Unit(benchmark::kMillisecond);

void BM_SdeSteps(benchmark::State& state) {
    SpdModel m = paper_model();
    if (state.range(0)) {
        m.noise_case = NoiseCase::CaseII;
        m.damping.beta1 = 0.05;
        m.noise.n1 = {0.005, 0.5};
        m.noise.n2 = {0.005, 0.5};
        m.noise.lambda = 0.45;
    }
    SimConfig cfg;
    cfg.n_steps = 1'000'000;
    cfg.burn_in_fraction = 0.0;
    for (auto _ : state) {
        double acc = 0.0;
        integrate(m, cfg, 0, [&](double, double x, double, double, double) { acc += x; });
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_steps);
}
BENCHMARK(BM_SdeSteps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Welch(benchmark::State& state) {
    const auto series = ou_generate({0.01, 0.5}, 0.05, 1 << 20, 3);
    for (auto _ : state) benchmark::DoNotOptimize(welch_psd(series, 0.05, {static_cast<int>(state.range(0))}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(series.size()));
}
BENCHMARK(BM_Welch)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Histogram(benchmark::State& state) {
    const auto series = ou_generate({0.01, 0.5}, 0.05, 1 << 20, 5);
    for (auto _ : state) benchmark::DoNotOptimize(histogram_density(series, BinSpec{-1.0, 1.0, 128}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(series.size()));
}
BENCHMARK(BM_Histogram)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
