#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "spde/fields.hpp"
#include "spde/noise.hpp"
#include "spde/simulate.hpp"

namespace {

std::vector<double> random_modes(std::size_t n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = g(rng) / static_cast<double>(k + 1);
    return c;
}

void BM_SineRoundTrip(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    spde::SineTransform tr(n, 1.0);
    auto modes = random_modes(n);
    std::vector<double> grid(n);
    for (auto _ : state) {
        tr.modes_to_grid(modes, grid);
        tr.grid_to_modes(grid, modes);
        benchmark::DoNotOptimize(modes.data());
    }
}
BENCHMARK(BM_SineRoundTrip)->Arg(255)->Arg(1023)->Arg(4095);

void BM_CubicDrift(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    spde::DriftEvaluator ev(spde::NonlinearitySpec::polynomial({0, 1, 0, -1}), {}, n);
    const auto x = random_modes(n);
    std::vector<double> out(n);
    for (auto _ : state) {
        ev.evaluate(x, {}, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_CubicDrift)->Arg(32)->Arg(100)->Arg(400);

void BM_BurgersDrift(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    spde::DriftEvaluator ev(spde::NonlinearitySpec::burgers(), {}, n);
    const auto x = random_modes(n);
    std::vector<double> out(n);
    for (auto _ : state) {
        ev.evaluate(x, {}, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_BurgersDrift)->Arg(100);

void BM_NoiseFill(benchmark::State& state) {
    const spde::CounterNormal rng(42);
    std::vector<double> z(static_cast<std::size_t>(state.range(0)));
    std::uint64_t step = 0;
    for (auto _ : state) {
        rng.fill(step++, z);
        benchmark::DoNotOptimize(z.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NoiseFill)->Arg(100);

// One Allen-Cahn trajectory of 1000 steps with 100 modes.
void BM_AllenCahnSteps(benchmark::State& state) {
    spde::ModelSpec m;
    m.theta_true = 0.02;
    m.gamma = 0.4;
    m.nonlinearity = spde::NonlinearitySpec::polynomial({0, 1, 0, -1});
    m.initial_modes = spde::ModeVector{1.0 / std::sqrt(2.0)};
    m.n_sim = 100;
    spde::SchemeSpec s;
    s.dt = 1e-4;
    s.t_final = 0.1;
    spde::EstimatorRequest req;
    req.alpha = 0.4;
    req.n_list = {4, 8, 16, 20, 32};
    for (auto _ : state) {
        auto out = spde::simulate(m, s, req);
        benchmark::DoNotOptimize(out.xT.values().data());
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_AllenCahnSteps)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
