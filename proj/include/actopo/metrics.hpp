#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "actopo/kernels.hpp"
#include "actopo/matrix.hpp"
#include "actopo/pointcloud.hpp"

namespace actopo {

enum class MetricKind { euclidean, cosine, mahalanobis, geodesic, dn_euclidean, dn_cosine, dn_mahalanobis };

inline constexpr MetricKind kAllMetricKinds[] = {
    MetricKind::euclidean,    MetricKind::cosine,    MetricKind::mahalanobis,   MetricKind::geodesic,
    MetricKind::dn_euclidean, MetricKind::dn_cosine, MetricKind::dn_mahalanobis,
};

std::string_view to_string(MetricKind kind);
MetricKind parse_metric_kind(std::string_view name);  // throws ParameterError

struct MetricSpec {
    MetricKind kind = MetricKind::euclidean;
    std::size_t k_neighbors = 10;        // geodesic and dn_* kinds
    double covariance_shrinkage = 1e-6;  // mahalanobis kinds

    [[nodiscard]] bool uses_neighbors() const noexcept;
    [[nodiscard]] bool uses_covariance() const noexcept;

    /// Throws ParameterError if the spec cannot be applied to a cloud of n points.
    void validate_for(std::size_t n) const;

    friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

/// N x N symmetric, zero-diagonal, non-negative distances tagged with the metric
/// that produced them. Entries are finite unless has_infinite() (geodesic only).
class DistanceMatrix {
  public:
    DistanceMatrix() = default;

    /// Checks every invariant; throws ParameterError on violation. +inf entries
    /// are accepted only for geodesic matrices.
    DistanceMatrix(Matrix values, MetricSpec spec);

    [[nodiscard]] std::size_t size() const noexcept { return values_.rows(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }
    [[nodiscard]] const Matrix& values() const noexcept { return values_; }
    [[nodiscard]] const MetricSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] bool has_infinite() const noexcept { return has_infinite_; }

    /// Largest finite entry, 0 for N = 1.
    [[nodiscard]] double max_finite() const noexcept;

  private:
    Matrix values_;
    MetricSpec spec_;
    bool has_infinite_ = false;
};

DistanceMatrix pairwise_distances(const LabeledPointCloud& cloud, const MetricSpec& spec);

/// Sample covariance (divisor N - 1) plus shrinkage * (trace / d) * I; the
/// identity when every point coincides. Requires N >= 2.
Matrix estimate_covariance(const LabeledPointCloud& cloud, double shrinkage);

/// Mahalanobis distances under a given covariance, via its Cholesky factor.
/// Throws ConditioningError if the covariance is not numerically positive-definite.
DistanceMatrix mahalanobis_distances(const LabeledPointCloud& cloud, const Matrix& covariance,
                                     const MetricSpec& spec = {MetricKind::mahalanobis});

/// mu_i = mean of the k smallest off-diagonal entries of row i (unfloored).
std::vector<double> density_scales(const DistanceMatrix& base, std::size_t k);

/// d_ij / sqrt(mu_i mu_j), with mu floored at 1e-12 * (max entry, or 1 if all zero).
DistanceMatrix density_normalize(const DistanceMatrix& base, const std::vector<double>& scales,
                                 const MetricSpec& result_spec);
DistanceMatrix density_normalize(const DistanceMatrix& base, const std::vector<double>& scales);

/// Lower-index-first k nearest neighbors per row, union-symmetrized into an
/// undirected edge set. Shared by the geodesic metric and RCM ordering.
kernels::WeightedGraph knn_graph(const Matrix& distances, std::size_t k);

/// All-pairs shortest paths over the union k-NN graph with Euclidean edge
/// weights; unreachable pairs are +inf.
DistanceMatrix geodesic_distances(const LabeledPointCloud& cloud, std::size_t k);

}  // namespace actopo
