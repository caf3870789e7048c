#include "sll/assembly.hpp"
#include "sll/eigensolve.hpp"
#include "sll/factorization.hpp"
#include "sll/geometry.hpp"

#include <benchmark/benchmark.h>

using namespace sll;

static void BM_AssembleLame(benchmark::State& state) {
    const Mesh mesh = mesh_for_level(DomainSpec::unit_square(), static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto sys = assemble_lame(mesh, 1.0, 1.0, BoundaryCondition::dirichlet);
        benchmark::DoNotOptimize(sys.stiffness.nonzeros());
    }
    state.counters["dofs"] = 2.0 * (mesh.num_vertices() + build_topology(mesh).num_edges());
}
BENCHMARK(BM_AssembleLame)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_FactorizeLame(benchmark::State& state) {
    const Mesh mesh = mesh_for_level(DomainSpec::unit_square(), static_cast<int>(state.range(0)));
    const auto red = reduce(assemble_lame(mesh, 1.0, 1.0, BoundaryCondition::dirichlet));
    for (auto _ : state) {
        SymmetricFactorization f(red.stiffness.lower());
        benchmark::DoNotOptimize(f.negative_count());
    }
    state.counters["dim"] = red.stiffness.dim();
}
BENCHMARK(BM_FactorizeLame)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_LanczosLame(benchmark::State& state) {
    const Mesh mesh = mesh_for_level(DomainSpec::unit_square(), 3);
    const auto red = reduce(assemble_lame(mesh, 1.0, 1.0, BoundaryCondition::dirichlet));
    LanczosOptions opts;
    opts.seed = 42;
    opts.compute_vectors = false;
    for (auto _ : state) {
        auto res = solve_shift_invert_lanczos(red.stiffness, red.mass, 0.0, static_cast<int>(state.range(0)), opts);
        benchmark::DoNotOptimize(res.eigenvalues.data());
    }
    state.counters["dim"] = red.stiffness.dim();
}
BENCHMARK(BM_LanczosLame)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
