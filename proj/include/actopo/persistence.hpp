#pragma once

#include <cstddef>
#include <vector>

#include "actopo/metrics.hpp"

namespace actopo {

/// One H0 death: the components holding point_a and point_b join at `threshold`.
/// Node ids: leaves are 0..N-1, the node created by event e is N + e.
struct MergeEvent {
    double threshold = 0.0;
    std::size_t cluster_a = 0;  // node containing point_a (the lower point index)
    std::size_t cluster_b = 0;  // node containing point_b
    std::size_t new_node = 0;
    std::size_t new_size = 0;
    std::size_t point_a = 0;
    std::size_t point_b = 0;
};

/// The full H0 filtration history, i.e. the single-linkage dendrogram.
/// Events are sorted by threshold; there are exactly N - essential_components.
struct MergeTree {
    std::size_t leaf_count = 0;
    std::size_t essential_components = 0;
    std::vector<MergeEvent> events;
};

struct PersistencePair {
    double birth = 0.0;
    double death = 0.0;
    int dimension = 0;
};

struct PersistenceDiagram {
    std::vector<PersistencePair> pairs;  // finite bars
    std::vector<double> essential;       // births of the infinite bars

    /// Canvas value for essential bars: 1.05 x the largest finite death, or
    /// 1.05 when there is none (or it is 0).
    [[nodiscard]] double essential_cap() const noexcept;
    [[nodiscard]] std::vector<double> sorted_deaths() const;
};

struct PersistenceResult {
    MergeTree tree;
    PersistenceDiagram diagram;
};

/// Kruskal over all finite edges sorted by (weight, min index, max index) with
/// union-by-size and path compression; an event is emitted whenever the two
/// endpoints have different roots. +inf entries never merge.
PersistenceResult h0_persistence(const DistanceMatrix& d);

PersistenceDiagram diagram_from_tree(const MergeTree& tree);

struct Component {
    std::size_t id = 0;
    std::vector<std::size_t> members;  // ascending
    [[nodiscard]] std::size_t size() const noexcept { return members.size(); }
};

/// Connected components of {(i, j) : D_ij <= threshold}. Component ids are
/// assigned in order of each component's smallest member.
struct ClusterAssignment {
    double threshold = 0.0;
    std::vector<std::size_t> component_of;
    std::vector<Component> components;
};

ClusterAssignment components_at(const MergeTree& tree, double threshold);

/// Partition of the points with every event applied (one component per
/// essential class).
ClusterAssignment final_components(const MergeTree& tree);

struct BottleneckResult {
    double distance = 0.0;
    std::size_t essential_a = 0;
    std::size_t essential_b = 0;
    [[nodiscard]] bool essential_mismatch() const noexcept { return essential_a != essential_b; }
};

/// Exact bottleneck distance between the finite parts of two diagrams (L-inf
/// ground cost, diagonal projections at half persistence). Essential bars are
/// only counted.
BottleneckResult bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b);

// Union-find over 0..n-1 with union by size and path compression.
class DisjointSets {
  public:
    explicit DisjointSets(std::size_t n);
    std::size_t find(std::size_t x);
    // Returns the surviving root, or n (invalid) if already joined.
    std::size_t unite(std::size_t a, std::size_t b);
    [[nodiscard]] std::size_t size_of_root(std::size_t root) const { return size_[root]; }

  private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace actopo
