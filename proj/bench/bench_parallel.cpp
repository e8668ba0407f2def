// Serial reference vs OpenMP paths on the hot loops.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "udnet/design.hpp"
#include "udnet/kernels.hpp"
#include "udnet/montecarlo.hpp"

using namespace udnet;

namespace {

double smooth(const TorusPoint& x) { return std::cos(x[0]) * std::cos(x[1]) + 1.0; }

void quadrature_parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(torus_quadrature(3, static_cast<int>(st.range(0)), smooth));
}
void quadrature_serial(benchmark::State& st) {
    for (auto _ : st)
        benchmark::DoNotOptimize(reference::torus_quadrature_serial(3, static_cast<int>(st.range(0)), smooth));
}

void gue_parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(gue_tail_mc(4, 4.0, st.range(0), RngStream(1)));
}
void gue_serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(reference::gue_tail_mc_serial(4, 4.0, st.range(0), RngStream(1)));
}

void ball_parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(mc_outside_ball(2, 0.01, std::nullopt, 0.5, st.range(0), RngStream(2)));
}
void ball_serial(benchmark::State& st) {
    for (auto _ : st)
        benchmark::DoNotOptimize(
            reference::mc_outside_ball_serial(2, 0.01, std::nullopt, 0.5, st.range(0), RngStream(2)));
}

std::vector<TorusPoint> points(std::size_t n) {
    std::vector<TorusPoint> xs;
    for (std::size_t i = 0; i < n; ++i)
        xs.emplace_back(3, std::vector<double>{std::sin(1.3 * i) * 3, std::cos(0.7 * i) * 3});
    return xs;
}

CharacterExpansion kernel3() {
    KernelParams p;
    p.d = 3;
    p.sigma = 0.05;
    return CharacterExpansion::pu_heat(p);
}

void kernel_parallel(benchmark::State& st) {
    const auto e = kernel3();
    const auto xs = points(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(e.evaluate_many(xs));
}
void kernel_serial(benchmark::State& st) {
    const auto e = kernel3();
    const auto xs = points(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(reference::evaluate_many_serial(e, xs));
}

WeightedGateSet haar_set(int n) {
    RngStream rng(3);
    std::vector<CMatrix> g;
    for (int i = 0; i < n; ++i) g.push_back(sample_haar_su(2, rng));
    return WeightedGateSet::uniform(2, g);
}

void moment_parallel(benchmark::State& st) {
    const auto nu = haar_set(64);
    for (auto _ : st) benchmark::DoNotOptimize(measure_moment(nu, static_cast<int>(st.range(0))));
}
void moment_serial(benchmark::State& st) {
    const auto nu = haar_set(64);
    for (auto _ : st) benchmark::DoNotOptimize(reference::measure_moment_serial(nu, static_cast<int>(st.range(0))));
}

}  // namespace

BENCHMARK(quadrature_serial)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(quadrature_parallel)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(gue_serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(gue_parallel)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(ball_serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(ball_parallel)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(kernel_serial)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(kernel_parallel)->Arg(4096)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(moment_serial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(moment_parallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
