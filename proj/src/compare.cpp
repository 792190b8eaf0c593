#include "actopo/compare.hpp"

#include <algorithm>
#include <set>

#include "actopo/error.hpp"
#include "actopo/sidecar.hpp"

namespace actopo {

using nlohmann::json;

PipelineResult run_pipeline(const LabeledPointCloud& cloud, const MetricSpec& spec,
                            const std::optional<std::filesystem::path>& cache_dir) {
    PipelineResult r;
    r.distances = cache_dir ? sidecar::load_or_compute(cloud, spec, *cache_dir) : pairwise_distances(cloud, spec);
    r.persistence = h0_persistence(r.distances);
    r.sweep = threshold_sweep(r.persistence.tree, cloud.labels());
    r.optimal = optimal_thresholds(r.sweep, 2);
    return r;
}

Reading read_at(const MergeTree& tree, const std::vector<int>& labels, double epsilon) {
    const auto assignment = components_at(tree, epsilon);
    return {epsilon, assignment.components.size(), purity(assignment, labels).weighted_mean,
            adjusted_rand(assignment, labels)};
}

Deltas deltas_between(const Reading& a, const Reading& b) {
    Deltas d;
    d.purity = b.mean_purity - a.mean_purity;
    d.ari = b.ari - a.ari;
    d.components = static_cast<long long>(b.n_components) - static_cast<long long>(a.n_components);
    if (a.n_components != 0) {
        d.components_percent = 100.0 * static_cast<double>(d.components) / static_cast<double>(a.n_components);
    }
    return d;
}

namespace {

CloudSummary summarize(const LabeledPointCloud& cloud, const PipelineResult& r) {
    CloudSummary s;
    s.n = cloud.size();
    s.essential_components = r.persistence.tree.essential_components;
    const auto& best = best_score(r.optimal);
    s.own = {best.epsilon, best.n_components, best.mean_purity, best.agreement};
    const auto deaths = r.persistence.diagram.sorted_deaths();
    const double qs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < 5; ++i) {
        s.death_quantiles[i] = quantile(deaths, qs[i]);
    }
    return s;
}

}  // namespace

ComparisonReport compare(const LabeledPointCloud& a, const LabeledPointCloud& b, const MetricSpec& spec,
                         const std::optional<std::filesystem::path>& cache_dir) {
    const std::set<std::string> va(a.class_names().begin(), a.class_names().end());
    const std::set<std::string> vb(b.class_names().begin(), b.class_names().end());
    if (va != vb) {
        throw ComparisonError("the two clouds have different class vocabularies");
    }
    if (a.size() < 2 || b.size() < 2) {
        throw InsufficientDataError("comparison needs at least 2 points per cloud");
    }
    const PipelineResult ra = run_pipeline(a, spec, cache_dir);
    const PipelineResult rb = run_pipeline(b, spec, cache_dir);
    if (ra.optimal.scores.empty() || rb.optimal.scores.empty()) {
        throw InsufficientDataError("a cloud has no finite merge events under this metric");
    }

    ComparisonReport rep;
    rep.metric = spec;
    rep.a = summarize(a, ra);
    rep.b = summarize(b, rb);
    rep.own = deltas_between(rep.a.own, rep.b.own);

    const double shared = (rep.a.own.epsilon + rep.b.own.epsilon) / 2.0;
    rep.shared_a = read_at(ra.persistence.tree, a.labels(), shared);
    rep.shared_b = read_at(rb.persistence.tree, b.labels(), shared);
    rep.shared = deltas_between(rep.shared_a, rep.shared_b);

    rep.reference_b = read_at(rb.persistence.tree, b.labels(), rep.a.own.epsilon);
    rep.reference = deltas_between(rep.a.own, rep.reference_b);

    rep.bottleneck = bottleneck_distance(ra.persistence.diagram, rb.persistence.diagram);
    return rep;
}

json to_json(const Reading& r) {
    return {{"epsilon", r.epsilon}, {"n_components", r.n_components}, {"mean_purity", r.mean_purity}, {"ari", r.ari}};
}

namespace {

json to_json(const Deltas& d) {
    json j = {{"purity", d.purity}, {"ari", d.ari}, {"components", d.components}};
    if (d.components_percent) {
        j["components_percent"] = *d.components_percent;
        j["components_percent_defined"] = true;
    } else {
        j["components_percent"] = nullptr;
        j["components_percent_defined"] = false;
    }
    return j;
}

json to_json(const CloudSummary& s) {
    return {{"n", s.n},
            {"essential_components", s.essential_components},
            {"own_optimal", to_json(s.own)},
            {"death_quantiles", s.death_quantiles}};
}

}  // namespace

json to_json(const ComparisonReport& r) {
    return {
        {"metric",
         {{"kind", to_string(r.metric.kind)},
          {"k_neighbors", r.metric.k_neighbors},
          {"covariance_shrinkage", r.metric.covariance_shrinkage}}},
        {"a", to_json(r.a)},
        {"b", to_json(r.b)},
        {"at_own_optimal", {{"deltas", to_json(r.own)}}},
        {"at_shared_epsilon",
         {{"epsilon", r.shared_a.epsilon}, {"a", to_json(r.shared_a)}, {"b", to_json(r.shared_b)},
          {"deltas", to_json(r.shared)}}},
        {"at_reference_epsilon",
         {{"epsilon", r.a.own.epsilon}, {"a", to_json(r.a.own)}, {"b", to_json(r.reference_b)},
          {"deltas", to_json(r.reference)}}},
        {"bottleneck",
         {{"distance", r.bottleneck.distance},
          {"essential_a", r.bottleneck.essential_a},
          {"essential_b", r.bottleneck.essential_b},
          {"essential_mismatch", r.bottleneck.essential_mismatch()}}},
    };
}

}  // namespace actopo
