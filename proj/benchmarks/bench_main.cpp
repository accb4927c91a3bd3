#include <benchmark/benchmark.h>

#include <map>

#include "ballquad/assemble.hpp"
#include "ballquad/localrbf.hpp"
#include "ballquad/moments.hpp"
#include "ballquad/nodegen.hpp"
#include "ballquad/tessellate.hpp"

using namespace ballquad;

namespace {

const Ball kBall{{0, 0, 0}, unit_volume_radius()};

const NodeSet& nodes(std::size_t n)
{
    static std::map<std::size_t, NodeSet> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, quasi_uniform_node_set(n, kBall)).first;
    }
    return it->second;
}

void BM_ApexIntegral(benchmark::State& state)
{
    const QuadratureRule1D rule = gauss_legendre(static_cast<int>(state.range(0)));
    const Point3 x{0.1, 0.2, 0.05}, a{1, 0, 0}, b{0, 1, 0}, c{0.2, 0.3, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(apex_tet_rbf_integral(x, a, b, c, PhsKernel{1}, rule));
    }
}
BENCHMARK(BM_ApexIntegral)->Arg(12)->Arg(24)->Arg(40);

void BM_TetRbfIntegral(benchmark::State& state)
{
    const QuadratureRule1D rule = gauss_legendre(24);
    const Tetra t{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const Point3 x{0.7, -0.3, 0.4};
    for (auto _ : state) {
        benchmark::DoNotOptimize(tet_rbf_integral(t, x, PhsKernel{1}, rule));
    }
}
BENCHMARK(BM_TetRbfIntegral);

void BM_LocalSolve(benchmark::State& state)
{
    const int m = static_cast<int>(state.range(0));
    const NodeSet& ns = nodes(2000);
    const Tessellation tess = delaunay3(ns);
    const Stencil st = stencil_for_tet(tess, ns, tess.size() / 2, recommended_n(m));
    const PolyBasis basis(m, st.shift, st.scale);
    const LocalSystem sys = assemble_A(st, ns, PhsKernel{1}, basis);
    const Eigen::VectorXd I = Eigen::VectorXd::Ones(sys.A.rows());
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_local(sys.A, I, sys.n, sys.tet_index));
    }
}
BENCHMARK(BM_LocalSolve)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_SliverRule(benchmark::State& state)
{
    const double r = kBall.radius;
    const SliverRegion s{{r, 0, 0}, {0.99 * r, 0.141 * r, 0}, {0.99 * r, 0, 0.141 * r}, kBall};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sliver_rule(s, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_SliverRule)->Arg(12)->Arg(20);

void BM_Delaunay(benchmark::State& state)
{
    const NodeSet& ns = nodes(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(delaunay3(ns));
    }
}
BENCHMARK(BM_Delaunay)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ComputeWeights(benchmark::State& state)
{
    const NodeSet& ns = nodes(static_cast<std::size_t>(state.range(0)));
    WeightParams p;
    p.m = static_cast<int>(state.range(1));
    p.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_weights(ns, p));
    }
    state.counters["nodes"] = static_cast<double>(ns.size());
}
BENCHMARK(BM_ComputeWeights)->Args({2000, 2})->Args({5000, 2})->Args({2000, 4})->Unit(benchmark::kSecond)->Iterations(1);

} // namespace

BENCHMARK_MAIN();
