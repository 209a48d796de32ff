#include <benchmark/benchmark.h>

#include <cmath>

#include "coneflow/monotone.hpp"

using namespace coneflow;

namespace {

const GreenModel& smoothed_model() {
    static const GreenModel model =
        build_green(make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0));
    return model;
}

void BM_ImproperIntegral(benchmark::State& state) {
    QuadSpec spec;
    spec.tail_radius = 10.0;
    const ConicalTail tail{1.0, 0.0, 4};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            integrate_to_infinity([](double s) { return std::pow(s, -3.0); }, 1.0, tail, spec));
    }
}
BENCHMARK(BM_ImproperIntegral);

void BM_GreenEvaluation(benchmark::State& state) {
    const GreenModel& model = smoothed_model();
    for (auto _ : state)
        benchmark::DoNotOptimize(model.green(1.0));
}
BENCHMARK(BM_GreenEvaluation);

void BM_LevelInversion(benchmark::State& state) {
    const GreenModel& model = smoothed_model();
    for (auto _ : state)
        benchmark::DoNotOptimize(model.radius_at_level(3.0));
}
BENCHMARK(BM_LevelInversion);

void BM_OdeExponential(benchmark::State& state) {
    auto field = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = 2.0 * y[0];
    };
    const double y0[] = {1.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_ode(field, y0, 0.0, 1.0, OdeSpec{}));
}
BENCHMARK(BM_OdeExponential);

void BM_FlowLine(benchmark::State& state) {
    const GreenModel& model = smoothed_model();
    for (auto _ : state)
        benchmark::DoNotOptimize(flow_line(model, 1.0, double(state.range(0))));
}
BENCHMARK(BM_FlowLine)->Arg(1)->Arg(8)->Arg(64);

void BM_HessWeightedIntegral(benchmark::State& state) {
    const GreenModel& model = smoothed_model();
    const double level = model.b(1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(hess_weighted_integral(model, level));
}
BENCHMARK(BM_HessWeightedIntegral);

void BM_MainTheoremTable(benchmark::State& state) {
    const GreenModel& model = smoothed_model();
    const double level = model.b(1.0);
    const double t_grid[] = {1.0, 2.0, 4.0, 8.0, 16.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(log_ratio_decay_table(model, level, t_grid, 64.0));
}
BENCHMARK(BM_MainTheoremTable);

} // namespace

BENCHMARK_MAIN();
