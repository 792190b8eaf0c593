// Serial reference vs. OpenMP kernel timings. Run with OMP_NUM_THREADS set to
// compare thread counts; the arg is the point count.
#include <benchmark/benchmark.h>

#include "actopo/kernels.hpp"
#include "actopo/metrics.hpp"
#include "actopo/synth.hpp"

namespace {

using namespace actopo;

Matrix cloud_points(std::int64_t n) {
    SynthSpec spec;
    spec.family = Family::gaussian_blobs;
    spec.n_classes = 4;
    spec.n_per_class = static_cast<std::size_t>(n) / 4;
    spec.dim = 16;
    spec.seed = 11;
    return generate(spec).points();
}

template <Matrix (*Fn)(const Matrix&, kernels::PairwiseKind)>
void pairwise(benchmark::State& state) {
    const Matrix x = cloud_points(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(Fn(x, kernels::PairwiseKind::euclidean));
    }
}

template <Matrix (*Fn)(const kernels::WeightedGraph&)>
void shortest_paths(benchmark::State& state) {
    const Matrix x = cloud_points(state.range(0));
    const auto graph = knn_graph(kernels::serial::pairwise(x, kernels::PairwiseKind::euclidean), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Fn(graph));
    }
}

template <kernels::NeighborLists (*Fn)(const Matrix&, std::size_t)>
void nearest(benchmark::State& state) {
    const Matrix d = kernels::serial::pairwise(cloud_points(state.range(0)), kernels::PairwiseKind::euclidean);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Fn(d, 10));
    }
}

}  // namespace

BENCHMARK(pairwise<kernels::serial::pairwise>)->Name("pairwise/serial")->Arg(400)->Arg(1600);
BENCHMARK(pairwise<kernels::omp::pairwise>)->Name("pairwise/omp")->Arg(400)->Arg(1600);
BENCHMARK(shortest_paths<kernels::serial::shortest_paths>)->Name("shortest_paths/serial")->Arg(400)->Arg(1200);
BENCHMARK(shortest_paths<kernels::omp::shortest_paths>)->Name("shortest_paths/omp")->Arg(400)->Arg(1200);
BENCHMARK(nearest<kernels::serial::nearest_neighbors>)->Name("nearest/serial")->Arg(400)->Arg(1600);
BENCHMARK(nearest<kernels::omp::nearest_neighbors>)->Name("nearest/omp")->Arg(400)->Arg(1600);

BENCHMARK_MAIN();
