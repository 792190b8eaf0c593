#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "actopo/matrix.hpp"

// The O(N^2) and O(N^2 log N) inner loops. Every kernel has an OpenMP version
// (used by the library) and a serial reference with identical per-cell
// arithmetic; the two must agree bitwise for any thread count, which the
// kernel tests check. Each output cell is written by exactly one worker.
namespace actopo::kernels {

enum class PairwiseKind { euclidean, cosine };

// Undirected weighted graph as adjacency lists; each edge appears in both lists.
struct WeightedGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;
};

// Per-row neighbor lists: the k nearest other points by (distance, index).
// Non-finite distances are never selected.
using NeighborLists = std::vector<std::vector<std::size_t>>;

namespace serial {
Matrix pairwise(const Matrix& points, PairwiseKind kind);
Matrix shortest_paths(const WeightedGraph& graph);
NeighborLists nearest_neighbors(const Matrix& distances, std::size_t k);
}  // namespace serial

namespace omp {
Matrix pairwise(const Matrix& points, PairwiseKind kind);
Matrix shortest_paths(const WeightedGraph& graph);
NeighborLists nearest_neighbors(const Matrix& distances, std::size_t k);
}  // namespace omp

namespace detail {

inline double squared_euclidean(const double* a, const double* b, std::size_t d) noexcept {
    double acc = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
        const double diff = a[t] - b[t];
        acc += diff * diff;
    }
    return acc;
}

inline double dot(const double* a, const double* b, std::size_t d) noexcept {
    double acc = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
        acc += a[t] * b[t];
    }
    return acc;
}

// 1 - cos, clamped to [0, 2]. sqrt(|a|^2 |b|^2) keeps parallel vectors at exactly 0
// more often than |a| * |b|.
double cosine_cell(const double* a, const double* b, std::size_t d, double norm2_a, double norm2_b) noexcept;

std::vector<double> squared_norms(const Matrix& points);

// Single-source Dijkstra; writes dist (size N, +inf where unreachable).
void dijkstra(const WeightedGraph& graph, std::size_t source, std::vector<double>& dist);

std::vector<std::size_t> nearest_row(const Matrix& distances, std::size_t row, std::size_t k);

}  // namespace detail

}  // namespace actopo::kernels
