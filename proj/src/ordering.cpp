#include "actopo/ordering.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "actopo/error.hpp"

namespace actopo {

Adjacency knn_adjacency(const DistanceMatrix& d, std::size_t k) {
    if (k == 0 || k >= d.size()) {
        throw ParameterError("k must satisfy 1 <= k < N (k = " + std::to_string(k) + ", N = " +
                             std::to_string(d.size()) + ")");
    }
    const auto graph = knn_graph(d.values(), k);
    Adjacency out(graph.adjacency.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (const auto& [j, w] : graph.adjacency[i]) {
            out[i].push_back(j);
        }
    }
    return out;
}

std::size_t bandwidth(const Adjacency& adjacency, const std::vector<std::size_t>& permutation) {
    std::vector<std::size_t> pos(permutation.size());
    for (std::size_t p = 0; p < permutation.size(); ++p) {
        pos[permutation[p]] = p;
    }
    std::size_t bw = 0;
    for (std::size_t i = 0; i < adjacency.size(); ++i) {
        for (std::size_t j : adjacency[i]) {
            bw = std::max(bw, pos[i] > pos[j] ? pos[i] - pos[j] : pos[j] - pos[i]);
        }
    }
    return bw;
}

Ordering rcm_order(const Adjacency& adjacency, std::string adjacency_rule) {
    const std::size_t n = adjacency.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : adjacency[i]) {
            if (j >= n || j == i) {
                throw ParameterError("adjacency must be a simple graph on 0..N-1");
            }
            if (std::find(adjacency[j].begin(), adjacency[j].end(), i) == adjacency[j].end()) {
                throw ParameterError("adjacency is not symmetric");
            }
        }
    }
    auto by_degree = [&](std::size_t a, std::size_t b) {
        const auto da = adjacency[a].size();
        const auto db = adjacency[b].size();
        return da < db || (da == db && a < b);
    };

    std::vector<std::size_t> vertices(n);
    std::iota(vertices.begin(), vertices.end(), std::size_t{0});
    std::sort(vertices.begin(), vertices.end(), by_degree);

    std::vector<bool> seen(n, false);
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<std::size_t> nbrs;
    for (std::size_t start : vertices) {
        if (seen[start]) {
            continue;
        }
        std::queue<std::size_t> q;
        q.push(start);
        seen[start] = true;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            order.push_back(u);
            nbrs.clear();
            for (std::size_t v : adjacency[u]) {
                if (!seen[v]) {
                    nbrs.push_back(v);
                }
            }
            std::sort(nbrs.begin(), nbrs.end(), by_degree);
            for (std::size_t v : nbrs) {
                seen[v] = true;
                q.push(v);
            }
        }
    }
    std::reverse(order.begin(), order.end());

    Ordering out;
    std::vector<std::size_t> identity(n);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    out.bandwidth_before = bandwidth(adjacency, identity);
    out.bandwidth_after = bandwidth(adjacency, order);
    out.permutation = std::move(order);
    out.adjacency_rule = std::move(adjacency_rule);
    return out;
}

std::vector<std::size_t> subtree_leaves(const MergeTree& tree, std::size_t node) {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        if (u < tree.leaf_count) {
            out.push_back(u);
        } else {
            const auto& e = tree.events.at(u - tree.leaf_count);
            stack.push_back(e.cluster_b);
            stack.push_back(e.cluster_a);
        }
    }
    return out;
}

Linkage linkage_from_tree(const MergeTree& tree, const Ordering& ordering) {
    const std::size_t n = tree.leaf_count;
    if (ordering.permutation.size() != n) {
        throw ParameterError("ordering length " + std::to_string(ordering.permutation.size()) +
                             " does not match N = " + std::to_string(n));
    }
    std::vector<double> rcm_pos(n);
    for (std::size_t p = 0; p < n; ++p) {
        rcm_pos[ordering.permutation[p]] = static_cast<double>(p);
    }

    Linkage out;
    out.rows.reserve(tree.events.size());
    const std::size_t total = n + tree.events.size();
    std::vector<double> pos_sum(total, 0.0);
    std::vector<std::size_t> count(total, 1);
    std::vector<bool> has_parent(total, false);
    for (std::size_t i = 0; i < n; ++i) {
        pos_sum[i] = rcm_pos[i];
    }
    for (const auto& e : tree.events) {
        out.rows.push_back({e.cluster_a, e.cluster_b, e.threshold, e.new_size});
        pos_sum[e.new_node] = pos_sum[e.cluster_a] + pos_sum[e.cluster_b];
        count[e.new_node] = count[e.cluster_a] + count[e.cluster_b];
        has_parent[e.cluster_a] = true;
        has_parent[e.cluster_b] = true;
    }
    // Compare means without division: sum_a / n_a < sum_b / n_b.
    auto earlier = [&](std::size_t a, std::size_t b) {
        const double lhs = pos_sum[a] * static_cast<double>(count[b]);
        const double rhs = pos_sum[b] * static_cast<double>(count[a]);
        return lhs < rhs || (lhs == rhs && a < b);
    };

    std::vector<std::size_t> roots;
    for (std::size_t u = 0; u < total; ++u) {
        if (!has_parent[u]) {
            roots.push_back(u);
        }
    }
    std::sort(roots.begin(), roots.end(), earlier);

    out.leaf_order.reserve(n);
    std::vector<std::size_t> stack(roots.rbegin(), roots.rend());
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        if (u < n) {
            out.leaf_order.push_back(u);
            continue;
        }
        const auto& e = tree.events[u - n];
        std::size_t first = e.cluster_a;
        std::size_t second = e.cluster_b;
        if (earlier(second, first)) {
            std::swap(first, second);
        }
        stack.push_back(second);
        stack.push_back(first);
    }

    if (n >= 2) {
        std::vector<std::size_t> leaf_pos(n);
        for (std::size_t p = 0; p < n; ++p) {
            leaf_pos[out.leaf_order[p]] = p;
        }
        std::size_t kept = 0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            const std::size_t a = leaf_pos[ordering.permutation[p]];
            const std::size_t b = leaf_pos[ordering.permutation[p + 1]];
            kept += (a > b ? a - b : b - a) == 1 ? 1 : 0;
        }
        out.rcm_adjacency_kept = static_cast<double>(kept) / static_cast<double>(n - 1);
    }
    return out;
}

}  // namespace actopo
