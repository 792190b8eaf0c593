#include "actopo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "actopo/error.hpp"

namespace actopo {

namespace {

void check_labels(std::size_t n, const std::vector<int>& labels) {
    if (labels.size() != n) {
        throw ParameterError("labels length " + std::to_string(labels.size()) + " does not match N = " +
                             std::to_string(n));
    }
}

double pairs(std::int64_t m) {
    return static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
}

}  // namespace

PurityResult purity(const ClusterAssignment& assignment, const std::vector<int>& labels) {
    check_labels(assignment.component_of.size(), labels);
    PurityResult out;
    out.per_cluster.reserve(assignment.components.size());
    std::size_t modal_total = 0;
    std::size_t total = 0;
    std::map<int, std::size_t> counts;
    for (const auto& comp : assignment.components) {
        counts.clear();
        std::size_t modal = 0;
        for (std::size_t p : comp.members) {
            modal = std::max(modal, ++counts[labels[p]]);
        }
        out.per_cluster.push_back(comp.size() == 0 ? 0.0
                                                   : static_cast<double>(modal) / static_cast<double>(comp.size()));
        modal_total += modal;
        total += comp.size();
    }
    out.weighted_mean = total == 0 ? 0.0 : static_cast<double>(modal_total) / static_cast<double>(total);
    return out;
}

double adjusted_rand(const std::vector<std::size_t>& clusters, const std::vector<int>& labels) {
    check_labels(clusters.size(), labels);
    const auto n = static_cast<std::int64_t>(clusters.size());
    std::map<std::pair<std::size_t, int>, std::int64_t> table;
    std::map<std::size_t, std::int64_t> row_sums;
    std::map<int, std::int64_t> col_sums;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        ++table[{clusters[i], labels[i]}];
        ++row_sums[clusters[i]];
        ++col_sums[labels[i]];
    }
    double index = 0.0;
    for (const auto& [key, count] : table) {
        index += pairs(count);
    }
    double sum_rows = 0.0;
    for (const auto& [key, count] : row_sums) {
        sum_rows += pairs(count);
    }
    double sum_cols = 0.0;
    for (const auto& [key, count] : col_sums) {
        sum_cols += pairs(count);
    }
    const double total = pairs(n);
    if (total == 0.0) {
        return 1.0;
    }
    const double expected = sum_rows * sum_cols / total;
    const double max_index = (sum_rows + sum_cols) / 2.0;
    const double denom = max_index - expected;
    if (denom == 0.0) {
        return 1.0;
    }
    return (index - expected) / denom;
}

double adjusted_rand(const ClusterAssignment& assignment, const std::vector<int>& labels) {
    return adjusted_rand(assignment.component_of, labels);
}

std::vector<ThresholdScore> threshold_sweep(const MergeTree& tree, const std::vector<int>& labels) {
    check_labels(tree.leaf_count, labels);
    std::vector<double> candidates;
    for (const auto& e : tree.events) {
        if (candidates.empty() || candidates.back() != e.threshold) {
            candidates.push_back(e.threshold);
        }
    }
    std::vector<ThresholdScore> out(candidates.size());
    const auto count = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t c = 0; c < count; ++c) {
        const auto idx = static_cast<std::size_t>(c);
        const ClusterAssignment a = components_at(tree, candidates[idx]);
        out[idx] = {candidates[idx], adjusted_rand(a, labels), purity(a, labels).weighted_mean, a.components.size()};
    }
    return out;
}

OptimalThresholds optimal_thresholds(const std::vector<ThresholdScore>& sweep, std::size_t count) {
    std::vector<ThresholdScore> ranked = sweep;
    std::stable_sort(ranked.begin(), ranked.end(), [](const ThresholdScore& a, const ThresholdScore& b) {
        if (a.agreement != b.agreement) {
            return a.agreement > b.agreement;
        }
        return a.epsilon < b.epsilon;
    });
    OptimalThresholds out;
    out.insufficient = ranked.size() < count;
    ranked.resize(std::min(count, ranked.size()));
    std::sort(ranked.begin(), ranked.end(),
              [](const ThresholdScore& a, const ThresholdScore& b) { return a.epsilon < b.epsilon; });
    out.scores = std::move(ranked);
    return out;
}

OptimalThresholds optimal_thresholds(const MergeTree& tree, const std::vector<int>& labels, std::size_t count) {
    return optimal_thresholds(threshold_sweep(tree, labels), count);
}

const ThresholdScore& best_score(const OptimalThresholds& optimal) {
    if (optimal.scores.empty()) {
        throw ParameterError("no optimal threshold available (the tree has no merge events)");
    }
    const ThresholdScore* best = &optimal.scores.front();
    for (const auto& s : optimal.scores) {
        if (s.agreement > best->agreement) {
            best = &s;
        }
    }
    return *best;
}

std::size_t noise_size_floor(std::size_t n) {
    const auto one_percent = static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(n)));
    return std::max<std::size_t>(2, one_percent);
}

std::vector<double> singleton_merge_times(const MergeTree& tree) {
    std::vector<double> out(tree.leaf_count, std::numeric_limits<double>::infinity());
    for (const auto& e : tree.events) {
        for (std::size_t node : {e.cluster_a, e.cluster_b}) {
            if (node < tree.leaf_count) {
                out[node] = e.threshold;
            }
        }
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

OutlierReport detect_outliers(const MergeTree& tree, const ThresholdScore& optimal) {
    OutlierReport report;
    report.epsilon = optimal.epsilon;
    report.size_floor = noise_size_floor(tree.leaf_count);

    const auto times = singleton_merge_times(tree);
    std::vector<double> finite;
    for (double t : times) {
        if (std::isfinite(t)) {
            finite.push_back(t);
        }
    }
    const double q1 = quantile(finite, 0.25);
    const double q3 = quantile(finite, 0.75);
    report.late_threshold = q3 + 1.5 * (q3 - q1);
    if (tree.leaf_count > 1) {
        for (std::size_t p = 0; p < times.size(); ++p) {
            if (times[p] > report.late_threshold) {
                report.isolated_points.push_back(p);
            }
        }
    }

    const auto assignment = components_at(tree, optimal.epsilon);
    for (const auto& comp : assignment.components) {
        if (comp.size() < report.size_floor) {
            report.noise_clusters.push_back(comp.id);
        }
    }
    return report;
}

}  // namespace actopo
