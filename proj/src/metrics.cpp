#include "actopo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "actopo/error.hpp"

namespace actopo {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_eigen(const Matrix& m) {
    return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

MetricKind base_kind(MetricKind kind) {
    switch (kind) {
    case MetricKind::dn_euclidean:
        return MetricKind::euclidean;
    case MetricKind::dn_cosine:
        return MetricKind::cosine;
    case MetricKind::dn_mahalanobis:
        return MetricKind::mahalanobis;
    default:
        return kind;
    }
}

}  // namespace

std::string_view to_string(MetricKind kind) {
    switch (kind) {
    case MetricKind::euclidean:
        return "euclidean";
    case MetricKind::cosine:
        return "cosine";
    case MetricKind::mahalanobis:
        return "mahalanobis";
    case MetricKind::geodesic:
        return "geodesic";
    case MetricKind::dn_euclidean:
        return "dn_euclidean";
    case MetricKind::dn_cosine:
        return "dn_cosine";
    case MetricKind::dn_mahalanobis:
        return "dn_mahalanobis";
    }
    return "unknown";
}

MetricKind parse_metric_kind(std::string_view name) {
    for (auto kind : kAllMetricKinds) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw ParameterError("unknown metric '" + std::string(name) + "'");
}

bool MetricSpec::uses_neighbors() const noexcept {
    return kind == MetricKind::geodesic || base_kind(kind) != kind;
}

bool MetricSpec::uses_covariance() const noexcept {
    return base_kind(kind) == MetricKind::mahalanobis;
}

void MetricSpec::validate_for(std::size_t n) const {
    if (uses_neighbors()) {
        if (k_neighbors == 0) {
            throw ParameterError("k_neighbors must be positive");
        }
        if (k_neighbors >= n) {
            throw ParameterError("k_neighbors = " + std::to_string(k_neighbors) + " must be < N = " +
                                 std::to_string(n));
        }
    }
    if (uses_covariance() && !(covariance_shrinkage >= 0.0)) {
        throw ParameterError("covariance shrinkage must be non-negative");
    }
}

DistanceMatrix::DistanceMatrix(Matrix values, MetricSpec spec)
  : values_{std::move(values)}
  , spec_{spec} {
    const std::size_t n = values_.rows();
    if (values_.cols() != n) {
        throw ParameterError("distance matrix must be square");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (values_(i, i) != 0.0) {
            throw ParameterError("distance matrix diagonal must be zero (row " + std::to_string(i) + ")");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = values_(i, j);
            if (v != values_(j, i)) {
                throw ParameterError("distance matrix is not symmetric at (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ")");
            }
            if (!(v >= 0.0)) {
                throw ParameterError("distance matrix has a negative or NaN entry at (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ")");
            }
            if (std::isinf(v)) {
                if (spec_.kind != MetricKind::geodesic) {
                    throw ParameterError("infinite distance is only allowed for geodesic matrices");
                }
                has_infinite_ = true;
            }
        }
    }
}

double DistanceMatrix::max_finite() const noexcept {
    double best = 0.0;
    for (double v : values_.data()) {
        if (std::isfinite(v)) {
            best = std::max(best, v);
        }
    }
    return best;
}

Matrix estimate_covariance(const LabeledPointCloud& cloud, double shrinkage) {
    const std::size_t n = cloud.size();
    const std::size_t d = cloud.dim();
    if (n < 2) {
        throw InsufficientDataError("covariance needs at least 2 points, got " + std::to_string(n));
    }
    const auto x = as_eigen(cloud.points());
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    const double trace = cov.trace();
    Matrix out(d, d);
    if (trace == 0.0) {
        for (std::size_t i = 0; i < d; ++i) {
            out(i, i) = 1.0;
        }
        return out;
    }
    cov.diagonal().array() += shrinkage * trace / static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            // Average the two triangles so the result is exactly symmetric.
            out(i, j) = 0.5 * (cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                               cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
        }
    }
    return out;
}

DistanceMatrix mahalanobis_distances(const LabeledPointCloud& cloud, const Matrix& covariance,
                                     const MetricSpec& spec) {
    const std::size_t d = cloud.dim();
    if (covariance.rows() != d || covariance.cols() != d) {
        throw ParameterError("covariance must be " + std::to_string(d) + "x" + std::to_string(d));
    }
    const Eigen::MatrixXd sigma = as_eigen(covariance);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("covariance is not positive-definite; increase --shrinkage");
    }
    const Eigen::MatrixXd lower = llt.matrixL();
    const Eigen::VectorXd diag = lower.diagonal();
    const double ratio = std::pow(diag.minCoeff() / diag.maxCoeff(), 2);
    if (!(ratio > 1e-12)) {
        throw ConditioningError("regularized covariance is ill-conditioned (eigenvalue ratio ~" + std::to_string(ratio) +
                                "); increase --shrinkage");
    }
    // Whitened coordinates y_i = L^{-1} x_i, so (x_i - x_j)^T S^{-1} (x_i - x_j) = |y_i - y_j|^2.
    const RowMajor whitened =
        lower.triangularView<Eigen::Lower>().solve(as_eigen(cloud.points()).transpose()).transpose();
    Matrix y(cloud.size(), d, std::vector<double>(whitened.data(), whitened.data() + whitened.size()));
    return DistanceMatrix(kernels::omp::pairwise(y, kernels::PairwiseKind::euclidean), spec);
}

std::vector<double> density_scales(const DistanceMatrix& base, std::size_t k) {
    const std::size_t n = base.size();
    if (k == 0 || k >= n) {
        throw ParameterError("density scales need 0 < k < N (k = " + std::to_string(k) + ", N = " +
                             std::to_string(n) + ")");
    }
    std::vector<double> mu(n);
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            if (!std::isfinite(base(i, j))) {
                throw ParameterError("density scales need finite base distances");
            }
            row.push_back(base(i, j));
        }
        std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
        mu[i] = std::accumulate(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
                static_cast<double>(k);
    }
    return mu;
}

DistanceMatrix density_normalize(const DistanceMatrix& base, const std::vector<double>& scales,
                                 const MetricSpec& result_spec) {
    const std::size_t n = base.size();
    if (scales.size() != n) {
        throw ParameterError("scale vector length must equal N");
    }
    const double max_entry = base.max_finite();
    const double floor = 1e-12 * (max_entry > 0.0 ? max_entry : 1.0);
    std::vector<double> mu(n);
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = std::max(scales[i], floor);
    }
    Matrix out(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = base(i, j) / std::sqrt(mu[i] * mu[j]);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return DistanceMatrix(std::move(out), result_spec);
}

DistanceMatrix density_normalize(const DistanceMatrix& base, const std::vector<double>& scales) {
    return density_normalize(base, scales, base.spec());
}

kernels::WeightedGraph knn_graph(const Matrix& distances, std::size_t k) {
    const std::size_t n = distances.rows();
    const auto lists = kernels::omp::nearest_neighbors(distances, k);
    std::vector<std::vector<std::size_t>> nbrs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : lists[i]) {
            nbrs[i].push_back(j);
            nbrs[j].push_back(i);
        }
    }
    kernels::WeightedGraph g;
    g.adjacency.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& v = nbrs[i];
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (std::size_t j : v) {
            g.adjacency[i].emplace_back(j, distances(i, j));
        }
    }
    return g;
}

DistanceMatrix geodesic_distances(const LabeledPointCloud& cloud, std::size_t k) {
    const MetricSpec spec{MetricKind::geodesic, k};
    spec.validate_for(cloud.size());
    const Matrix euclid = kernels::omp::pairwise(cloud.points(), kernels::PairwiseKind::euclidean);
    return DistanceMatrix(kernels::omp::shortest_paths(knn_graph(euclid, k)), spec);
}

DistanceMatrix pairwise_distances(const LabeledPointCloud& cloud, const MetricSpec& spec) {
    spec.validate_for(cloud.size());
    switch (spec.kind) {
    case MetricKind::euclidean:
        return DistanceMatrix(kernels::omp::pairwise(cloud.points(), kernels::PairwiseKind::euclidean), spec);
    case MetricKind::cosine: {
        const auto norms = kernels::detail::squared_norms(cloud.points());
        for (std::size_t i = 0; i < norms.size(); ++i) {
            if (norms[i] == 0.0) {
                throw DegenerateInputError("cosine distance undefined: row " + std::to_string(i) +
                                           " has zero norm");
            }
        }
        return DistanceMatrix(kernels::omp::pairwise(cloud.points(), kernels::PairwiseKind::cosine), spec);
    }
    case MetricKind::mahalanobis:
        return mahalanobis_distances(cloud, estimate_covariance(cloud, spec.covariance_shrinkage), spec);
    case MetricKind::geodesic:
        return geodesic_distances(cloud, spec.k_neighbors);
    case MetricKind::dn_euclidean:
    case MetricKind::dn_cosine:
    case MetricKind::dn_mahalanobis: {
        MetricSpec base_spec = spec;
        base_spec.kind = base_kind(spec.kind);
        const DistanceMatrix base = pairwise_distances(cloud, base_spec);
        return density_normalize(base, density_scales(base, spec.k_neighbors), spec);
    }
    }
    throw ParameterError("unhandled metric kind");
}

}  // namespace actopo
