#include <cmath>
#include <cstdint>

#include <omp.h>

#include "actopo/kernels.hpp"

namespace actopo::kernels::omp {

Matrix pairwise(const Matrix& points, PairwiseKind kind) {
    const auto n = static_cast<std::int64_t>(points.rows());
    const std::size_t d = points.cols();
    Matrix out(points.rows(), points.rows(), 0.0);
    const std::vector<double> norms = kind == PairwiseKind::cosine ? detail::squared_norms(points) : std::vector<double>{};

    // Row i owns cells (i, j) and (j, i) for j > i. Rows shrink with i, so
    // schedule dynamically.
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* a = points.row(i).data();
        for (std::size_t j = i + 1; j < points.rows(); ++j) {
            const double* b = points.row(j).data();
            const double v = kind == PairwiseKind::euclidean ? std::sqrt(detail::squared_euclidean(a, b, d))
                                                             : detail::cosine_cell(a, b, d, norms[i], norms[j]);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

NeighborLists nearest_neighbors(const Matrix& distances, std::size_t k) {
    const auto n = static_cast<std::int64_t>(distances.rows());
    NeighborLists out(distances.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = detail::nearest_row(distances, static_cast<std::size_t>(i), k);
    }
    return out;
}

}  // namespace actopo::kernels::omp
