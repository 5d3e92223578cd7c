#include <benchmark/benchmark.h>

#include <nhfa/pde.hpp>
#include <nhfa/symbols.hpp>

using namespace nhfa;

namespace {

SystemPtr torus_system(int N, int n) {
    return build_analytic(Model::TorusLaplacian, N,
                          Grid::build(GridKind::Torus, n, QuadratureRule::Uniform));
}

GridFunction gaussian_member(const SystemPtr& sys) {
    EnsembleConfig cfg;
    cfg.count = 1;
    cfg.seed = 99;
    return make_ensemble(sys, cfg)[0];
}

void bm_forward(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    auto sys = torus_system(N, 8 * N);
    GridFunction f = gaussian_member(sys);
    for (auto _ : state) {
        auto a = forward(sys, f);
        benchmark::DoNotOptimize(a.values.data());
    }
}
BENCHMARK(bm_forward)->Arg(32)->Arg(128)->Arg(512);

void bm_apply_multiplier(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    auto sys = torus_system(N, 8 * N);
    SampledSymbol sym = sample(SymbolSpec::expression("1/(1+w)"), sys, 0);
    GridFunction f = gaussian_member(sys);
    for (auto _ : state) {
        GridFunction af = apply(sym, f);
        benchmark::DoNotOptimize(af.values.data());
    }
}
BENCHMARK(bm_apply_multiplier)->Arg(32)->Arg(128)->Arg(512);

void bm_bmo_norm(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto grid = Grid::build(GridKind::Torus, n, QuadratureRule::Uniform);
    GridFunction f = make_function(grid, [](double x) { return Complex(std::sin(2 * pi * x), 0); });
    for (auto _ : state) benchmark::DoNotOptimize(bmo_norm(f));
}
BENCHMARK(bm_bmo_norm)->Arg(64)->Arg(256)->Arg(512);

void bm_weak_quantity(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    auto sys = torus_system(N, 8 * N);
    SampledSymbol sym = sample(SymbolSpec::expression("(1+pow(sin(2*pi*x),2))/(1+w)"), sys, 1);
    for (auto _ : state) benchmark::DoNotOptimize(weak_quantity(sym, 2.0, 1));
}
BENCHMARK(bm_weak_quantity)->Arg(16)->Arg(32)->Arg(64);

void bm_hm_norm(benchmark::State& state) {
    SymbolSpec tau = SymbolSpec::expression("1/(1+w)");
    HmResolution res;
    res.samples = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hm_norm(tau, 2.0, 1.0, res).value);
}
BENCHMARK(bm_hm_norm)->Arg(1 << 12)->Arg(1 << 14);

void bm_heat_step(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    auto sys = torus_system(N, 8 * N);
    GridFunction u0 = make_function(sys->grid, [](double x) { return Complex(std::cos(2 * pi * x), 0); });
    CauchyProblem pb;
    pb.sys = sys;
    pb.B = sample(SymbolSpec::expression("1/(1+w)"), sys, 0);
    pb.p = 2.0;
    pb.u0 = u0;
    pb.horizon = 0.1;
    for (auto _ : state) {
        Trajectory t = solve_heat(pb, 0.01, 1e-10);
        benchmark::DoNotOptimize(t.l2_norms.back());
    }
}
BENCHMARK(bm_heat_step)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
