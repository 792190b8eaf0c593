#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "actopo/metrics.hpp"
#include "actopo/persistence.hpp"

namespace actopo {

/// Symmetric boolean adjacency as sorted neighbor lists (no self loops).
using Adjacency = std::vector<std::vector<std::size_t>>;

struct Ordering {
    std::vector<std::size_t> permutation;  // new position -> original index
    std::size_t bandwidth_before = 0;
    std::size_t bandwidth_after = 0;
    std::string adjacency_rule;
};

struct LinkageRow {
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;
};

struct Linkage {
    std::vector<LinkageRow> rows;  // merge order
    std::vector<std::size_t> leaf_order;
    /// Fraction of RCM-adjacent pairs that are also adjacent in leaf_order
    /// (1 when N < 2).
    double rcm_adjacency_kept = 1.0;
};

/// Union-symmetrized k-NN graph, same tie rule as the geodesic metric.
Adjacency knn_adjacency(const DistanceMatrix& d, std::size_t k);

/// max |pos(i) - pos(j)| over edges, where pos is the inverse of `permutation`.
std::size_t bandwidth(const Adjacency& adjacency, const std::vector<std::size_t>& permutation);

/// Reverse Cuthill-McKee. Components are started from their minimum-degree
/// vertex (lowest index on ties) in order of that vertex.
Ordering rcm_order(const Adjacency& adjacency, std::string adjacency_rule = "");

/// Linkage rows in merge order; leaf order puts the child with the smaller
/// mean RCM position first at every internal node. Disconnected roots are laid
/// out by the same rule.
Linkage linkage_from_tree(const MergeTree& tree, const Ordering& ordering);

/// Positions of every leaf under `node` (leaf or N + event index).
std::vector<std::size_t> subtree_leaves(const MergeTree& tree, std::size_t node);

}  // namespace actopo
