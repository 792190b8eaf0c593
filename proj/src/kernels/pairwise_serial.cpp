#include <algorithm>
#include <cmath>

#include "actopo/kernels.hpp"

namespace actopo::kernels {

namespace detail {

double cosine_cell(const double* a, const double* b, std::size_t d, double norm2_a, double norm2_b) noexcept {
    const double c = dot(a, b, d) / std::sqrt(norm2_a * norm2_b);
    return std::clamp(1.0 - c, 0.0, 2.0);
}

std::vector<double> squared_norms(const Matrix& points) {
    std::vector<double> out(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const double* p = points.row(i).data();
        out[i] = dot(p, p, points.cols());
    }
    return out;
}

std::vector<std::size_t> nearest_row(const Matrix& distances, std::size_t row, std::size_t k) {
    const std::size_t n = distances.rows();
    std::vector<std::size_t> candidates;
    candidates.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j != row && std::isfinite(distances(row, j))) {
            candidates.push_back(j);
        }
    }
    const std::size_t take = std::min(k, candidates.size());
    auto closer = [&](std::size_t a, std::size_t b) {
        const double da = distances(row, a);
        const double db = distances(row, b);
        return da < db || (da == db && a < b);
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                      closer);
    candidates.resize(take);
    return candidates;
}

}  // namespace detail

namespace serial {

Matrix pairwise(const Matrix& points, PairwiseKind kind) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    Matrix out(n, n, 0.0);
    const std::vector<double> norms = kind == PairwiseKind::cosine ? detail::squared_norms(points) : std::vector<double>{};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* a = points.row(i).data();
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
    NeighborLists out(distances.rows());
    for (std::size_t i = 0; i < distances.rows(); ++i) {
        out[i] = detail::nearest_row(distances, i, k);
    }
    return out;
}

}  // namespace serial

}  // namespace actopo::kernels
