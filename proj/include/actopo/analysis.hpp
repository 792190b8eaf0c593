#pragma once

#include <cstddef>
#include <vector>

#include "actopo/persistence.hpp"

namespace actopo {

struct PurityResult {
    std::vector<double> per_cluster;  // indexed by component id
    double weighted_mean = 0.0;
};

/// Per-cluster purity = modal class count / size; mean weighted by size.
PurityResult purity(const ClusterAssignment& assignment, const std::vector<int>& labels);

/// Adjusted Rand Index from the contingency table. Returns 1 when both
/// partitions have identical pair structure (the chance-corrected ratio is 0/0).
double adjusted_rand(const ClusterAssignment& assignment, const std::vector<int>& labels);
double adjusted_rand(const std::vector<std::size_t>& clusters, const std::vector<int>& labels);

struct ThresholdScore {
    double epsilon = 0.0;
    double agreement = 0.0;  // ARI against the labels
    double mean_purity = 0.0;
    std::size_t n_components = 0;
};

/// Scores every distinct finite death (ascending). Parallel over candidates,
/// each writing its own slot.
std::vector<ThresholdScore> threshold_sweep(const MergeTree& tree, const std::vector<int>& labels);

struct OptimalThresholds {
    std::vector<ThresholdScore> scores;  // ascending epsilon
    bool insufficient = false;           // fewer distinct thresholds than requested
};

/// Top `count` distinct thresholds by ARI (ties toward smaller epsilon),
/// returned in ascending epsilon order.
OptimalThresholds optimal_thresholds(const std::vector<ThresholdScore>& sweep, std::size_t count = 2);
OptimalThresholds optimal_thresholds(const MergeTree& tree, const std::vector<int>& labels, std::size_t count = 2);

/// The highest-agreement entry (smallest epsilon on ties).
const ThresholdScore& best_score(const OptimalThresholds& optimal);

struct OutlierReport {
    std::vector<std::size_t> isolated_points;  // late singleton merges
    std::vector<std::size_t> noise_clusters;   // component ids at the optimal epsilon
    double late_threshold = 0.0;               // Q3 + 1.5 IQR of singleton merge times
    std::size_t size_floor = 0;                // max(2, ceil(0.01 N))
    double epsilon = 0.0;
};

/// Smallest cluster size that is not noise: max(2, ceil(0.01 N)).
std::size_t noise_size_floor(std::size_t n);

/// Threshold at which each point stops being a singleton (+inf if never).
std::vector<double> singleton_merge_times(const MergeTree& tree);

/// Linear-interpolation quantile (q in [0, 1]) of unsorted values.
double quantile(std::vector<double> values, double q);

OutlierReport detect_outliers(const MergeTree& tree, const ThresholdScore& optimal);

}  // namespace actopo
