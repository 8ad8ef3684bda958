// Serial reference kernels against the OpenMP paths.
#include "mfforge/pipeline.hpp"

#include <benchmark/benchmark.h>

using namespace mfforge;

namespace {

const SurfaceMesh& sphere_mesh(int p)
{
    static std::array<std::unique_ptr<SurfaceMesh>, 7> cache;
    if (!cache[p])
        cache[p] = std::make_unique<SurfaceMesh>(generate_mesh(get_case("sphere"), 1.0 / 8.0, p).surface.mesh);
    return *cache[p];
}

void stiffness(benchmark::State& state, Execution exec)
{
    const SurfaceMesh& mesh = sphere_mesh(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_stiffness(mesh, exec));
    state.counters["cells"] = mesh.num_cells();
}

void reconstruction(benchmark::State& state, Execution exec)
{
    const CaseSpec& c = get_case("sphere");
    const auto bg = prepare_background(c.manifold, c.lo, c.hi, 1.0 / 8.0, c.nodes, {}, exec);
    for (auto _ : state)
        benchmark::DoNotOptimize(reconstruct(bg.mesh, c.manifold.master, static_cast<int>(state.range(0)),
                                             Tolerances::for_h(bg.mesh.h), exec));
}

void relocation(benchmark::State& state, Execution exec)
{
    const CaseSpec& c = get_case("sphere");
    for (auto _ : state)
        benchmark::DoNotOptimize(prepare_background(c.manifold, c.lo, c.hi, 1.0 / 8.0, c.nodes, {}, exec));
}

} // namespace

BENCHMARK_CAPTURE(stiffness, serial, Execution::serial)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(stiffness, parallel, Execution::parallel)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(reconstruction, serial, Execution::serial)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(reconstruction, parallel, Execution::parallel)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(relocation, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(relocation, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
