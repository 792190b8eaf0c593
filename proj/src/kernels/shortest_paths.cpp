#include <cstdint>
#include <functional>
#include <limits>
#include <queue>

#include <omp.h>

#include "actopo/kernels.hpp"

namespace actopo::kernels {

namespace detail {

void dijkstra(const WeightedGraph& graph, std::size_t source, std::vector<double>& dist) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = graph.adjacency.size();
    dist.assign(n, inf);
    dist[source] = 0.0;
    using Entry = std::pair<double, std::size_t>;
    // Ties pop by lower index, so relaxation order is fixed.
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) {
            continue;
        }
        for (const auto& [v, w] : graph.adjacency[u]) {
            const double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
}

}  // namespace detail

namespace {

// Source i fills cells (i, j) and (j, i) for j > i: the lower-indexed endpoint's
// run decides each pair, which keeps the result exactly symmetric.
void fill_from_source(const WeightedGraph& graph, std::size_t i, std::vector<double>& scratch, Matrix& out) {
    detail::dijkstra(graph, i, scratch);
    for (std::size_t j = i + 1; j < scratch.size(); ++j) {
        out(i, j) = scratch[j];
        out(j, i) = scratch[j];
    }
}

}  // namespace

namespace serial {

Matrix shortest_paths(const WeightedGraph& graph) {
    const std::size_t n = graph.adjacency.size();
    Matrix out(n, n, 0.0);
    std::vector<double> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        fill_from_source(graph, i, scratch, out);
    }
    return out;
}

}  // namespace serial

namespace omp {

Matrix shortest_paths(const WeightedGraph& graph) {
    const auto n = static_cast<std::int64_t>(graph.adjacency.size());
    Matrix out(graph.adjacency.size(), graph.adjacency.size(), 0.0);
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(dynamic, 4)
        for (std::int64_t i = 0; i < n; ++i) {
            fill_from_source(graph, static_cast<std::size_t>(i), scratch, out);
        }
    }
    return out;
}

}  // namespace omp

}  // namespace actopo::kernels
