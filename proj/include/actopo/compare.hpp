#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "actopo/analysis.hpp"
#include "actopo/metrics.hpp"
#include "actopo/persistence.hpp"
#include "actopo/pointcloud.hpp"

namespace actopo {

/// distances -> persistence -> threshold sweep -> optimal thresholds.
struct PipelineResult {
    DistanceMatrix distances;
    PersistenceResult persistence;
    std::vector<ThresholdScore> sweep;
    OptimalThresholds optimal;
};

/// With a cache directory the distance matrix goes through the sidecar cache.
PipelineResult run_pipeline(const LabeledPointCloud& cloud, const MetricSpec& spec,
                            const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

/// Partition statistics of one cloud at one epsilon.
struct Reading {
    double epsilon = 0.0;
    std::size_t n_components = 0;
    double mean_purity = 0.0;
    double ari = 0.0;
};

Reading read_at(const MergeTree& tree, const std::vector<int>& labels, double epsilon);

struct CloudSummary {
    std::size_t n = 0;
    std::size_t essential_components = 0;
    Reading own;                              // at this cloud's ARI-optimal epsilon
    std::array<double, 5> death_quantiles{};  // min, Q1, median, Q3, max of finite deaths
};

/// b minus a. Percent change uses a as the base and is absent when that is 0.
struct Deltas {
    double purity = 0.0;
    double ari = 0.0;
    long long components = 0;
    std::optional<double> components_percent;
};

Deltas deltas_between(const Reading& a, const Reading& b);

struct ComparisonReport {
    MetricSpec metric;
    CloudSummary a;
    CloudSummary b;
    // Each cloud at its own optimal epsilon.
    Deltas own;
    // Both clouds at the mean of the two optima.
    Reading shared_a;
    Reading shared_b;
    Deltas shared;
    // Both clouds at a's optimal epsilon.
    Reading reference_b;
    Deltas reference;
    BottleneckResult bottleneck;
};

/// Throws ComparisonError when the class vocabularies differ.
ComparisonReport compare(const LabeledPointCloud& a, const LabeledPointCloud& b, const MetricSpec& spec,
                         const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

nlohmann::json to_json(const Reading& r);
nlohmann::json to_json(const ComparisonReport& r);

}  // namespace actopo
