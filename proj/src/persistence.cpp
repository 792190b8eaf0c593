#include "actopo/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include <parallel/algorithm>

#include "actopo/error.hpp"

namespace actopo {

DisjointSets::DisjointSets(std::size_t n)
  : parent_(n)
  , size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) {
        root = parent_[root];
    }
    while (parent_[x] != root) {
        const std::size_t next = parent_[x];
        parent_[x] = root;
        x = next;
    }
    return root;
}

std::size_t DisjointSets::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) {
        return parent_.size();
    }
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) {
        std::swap(a, b);
    }
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
}

double PersistenceDiagram::essential_cap() const noexcept {
    double max_death = 0.0;
    for (const auto& p : pairs) {
        max_death = std::max(max_death, p.death);
    }
    return 1.05 * (max_death > 0.0 ? max_death : 1.0);
}

std::vector<double> PersistenceDiagram::sorted_deaths() const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        out.push_back(p.death);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct Edge {
    double weight;
    std::uint32_t i;
    std::uint32_t j;

    friend bool operator<(const Edge& a, const Edge& b) noexcept {
        if (a.weight != b.weight) {
            return a.weight < b.weight;
        }
        if (a.i != b.i) {
            return a.i < b.i;
        }
        return a.j < b.j;
    }
};

}  // namespace

PersistenceDiagram diagram_from_tree(const MergeTree& tree) {
    PersistenceDiagram diagram;
    diagram.pairs.reserve(tree.events.size());
    for (const auto& e : tree.events) {
        diagram.pairs.push_back({0.0, e.threshold, 0});
    }
    diagram.essential.assign(tree.essential_components, 0.0);
    return diagram;
}

PersistenceResult h0_persistence(const DistanceMatrix& d) {
    const std::size_t n = d.size();
    if (n > std::numeric_limits<std::uint32_t>::max()) {
        throw ParameterError("point count exceeds 32-bit index range");
    }
    std::vector<Edge> edges;
    edges.reserve(n < 2 ? 0 : n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = d(i, j);
            if (std::isfinite(w)) {
                edges.push_back({w, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
            }
        }
    }
    // The comparator is a strict total order, so the parallel sort is deterministic.
    __gnu_parallel::sort(edges.begin(), edges.end());

    MergeTree tree;
    tree.leaf_count = n;
    tree.events.reserve(n == 0 ? 0 : n - 1);
    DisjointSets sets(n);
    std::vector<std::size_t> node_of_root(n);
    std::iota(node_of_root.begin(), node_of_root.end(), std::size_t{0});
    for (const auto& e : edges) {
        if (tree.events.size() + 1 == n) {
            break;
        }
        const std::size_t ra = sets.find(e.i);
        const std::size_t rb = sets.find(e.j);
        if (ra == rb) {
            continue;
        }
        MergeEvent ev;
        ev.threshold = e.weight;
        ev.point_a = e.i;
        ev.point_b = e.j;
        ev.cluster_a = node_of_root[ra];
        ev.cluster_b = node_of_root[rb];
        ev.new_node = n + tree.events.size();
        const std::size_t root = sets.unite(ra, rb);
        ev.new_size = sets.size_of_root(root);
        node_of_root[root] = ev.new_node;
        tree.events.push_back(ev);
    }
    tree.essential_components = n - tree.events.size();
    PersistenceResult result;
    result.diagram = diagram_from_tree(tree);
    result.tree = std::move(tree);
    return result;
}

namespace {

ClusterAssignment label_components(DisjointSets& sets, std::size_t n, double threshold) {
    ClusterAssignment out;
    out.threshold = threshold;
    out.component_of.assign(n, 0);
    std::vector<std::size_t> id_of_root(n, n);
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t root = sets.find(p);
        if (id_of_root[root] == n) {
            id_of_root[root] = out.components.size();
            out.components.push_back({out.components.size(), {}});
        }
        const std::size_t id = id_of_root[root];
        out.component_of[p] = id;
        out.components[id].members.push_back(p);
    }
    return out;
}

}  // namespace

ClusterAssignment components_at(const MergeTree& tree, double threshold) {
    if (!(threshold >= 0.0)) {
        throw ParameterError("component threshold must be >= 0");
    }
    DisjointSets sets(tree.leaf_count);
    for (const auto& e : tree.events) {
        if (e.threshold > threshold) {
            break;
        }
        sets.unite(e.point_a, e.point_b);
    }
    return label_components(sets, tree.leaf_count, threshold);
}

ClusterAssignment final_components(const MergeTree& tree) {
    DisjointSets sets(tree.leaf_count);
    for (const auto& e : tree.events) {
        sets.unite(e.point_a, e.point_b);
    }
    const double top = tree.events.empty() ? 0.0 : tree.events.back().threshold;
    return label_components(sets, tree.leaf_count, top);
}

}  // namespace actopo
