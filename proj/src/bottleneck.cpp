#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "actopo/persistence.hpp"

namespace actopo {

namespace {

struct Point {
    double birth;
    double death;
    double half_persistence;
};

std::vector<Point> finite_points(const PersistenceDiagram& d) {
    std::vector<Point> out;
    out.reserve(d.pairs.size());
    for (const auto& p : d.pairs) {
        out.push_back({p.birth, p.death, (p.death - p.birth) / 2.0});
    }
    std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) {
        return a.death < b.death || (a.death == b.death && a.birth < b.birth);
    });
    return out;
}

// Maximum bipartite matching (Hopcroft-Karp) of `left` vertices into 0..n_right-1.
class HopcroftKarp {
  public:
    HopcroftKarp(const std::vector<std::vector<std::size_t>>& adjacency, std::size_t n_right)
      : adj_{adjacency}
      , match_left_(adjacency.size(), kNone)
      , match_right_(n_right, kNone)
      , layer_(adjacency.size()) {}

    std::size_t run() {
        std::size_t matched = 0;
        while (bfs()) {
            for (std::size_t u = 0; u < adj_.size(); ++u) {
                if (match_left_[u] == kNone && dfs(u)) {
                    ++matched;
                }
            }
        }
        return matched;
    }

  private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    bool bfs() {
        std::queue<std::size_t> q;
        bool found = false;
        for (std::size_t u = 0; u < adj_.size(); ++u) {
            layer_[u] = match_left_[u] == kNone ? 0 : kNone;
            if (layer_[u] == 0) {
                q.push(u);
            }
        }
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t v : adj_[u]) {
                const std::size_t w = match_right_[v];
                if (w == kNone) {
                    found = true;
                } else if (layer_[w] == kNone) {
                    layer_[w] = layer_[u] + 1;
                    q.push(w);
                }
            }
        }
        return found;
    }

    bool dfs(std::size_t u) {
        for (std::size_t v : adj_[u]) {
            const std::size_t w = match_right_[v];
            if (w == kNone || (layer_[w] == layer_[u] + 1 && dfs(w))) {
                match_left_[u] = v;
                match_right_[v] = u;
                return true;
            }
        }
        layer_[u] = kNone;
        return false;
    }

    const std::vector<std::vector<std::size_t>>& adj_;
    std::vector<std::size_t> match_left_;
    std::vector<std::size_t> match_right_;
    std::vector<std::size_t> layer_;
};

// Can every point of `from` with half-persistence > c be matched into `to` at
// L-inf cost <= c? `to` is sorted by death.
bool covers_required(const std::vector<Point>& from, const std::vector<Point>& to, double c) {
    std::vector<std::vector<std::size_t>> adj;
    for (const auto& p : from) {
        if (!(p.half_persistence > c)) {
            continue;
        }
        auto& row = adj.emplace_back();
        auto lo = std::lower_bound(to.begin(), to.end(), p.death - c,
                                   [](const Point& q, double v) { return q.death < v; });
        for (auto it = lo; it != to.end() && it->death <= p.death + c; ++it) {
            if (std::abs(it->death - p.death) <= c && std::abs(it->birth - p.birth) <= c) {
                row.push_back(static_cast<std::size_t>(it - to.begin()));
            }
        }
        if (row.empty()) {
            return false;
        }
    }
    if (adj.empty()) {
        return true;
    }
    if (adj.size() > to.size()) {
        return false;
    }
    return HopcroftKarp(adj, to.size()).run() == adj.size();
}

// A perfect matching of the diagonal-augmented bipartite graph exists iff some
// A-B matching covers every point that cannot go to the diagonal. Matchings
// covering each side's required set separately combine into one covering both
// (Mendelsohn-Dulmage), so two one-sided checks suffice.
bool feasible(const std::vector<Point>& a, const std::vector<Point>& b, double c) {
    return covers_required(a, b, c) && covers_required(b, a, c);
}

}  // namespace

BottleneckResult bottleneck_distance(const PersistenceDiagram& da, const PersistenceDiagram& db) {
    BottleneckResult result;
    result.essential_a = da.essential.size();
    result.essential_b = db.essential.size();
    const auto a = finite_points(da);
    const auto b = finite_points(db);
    if (feasible(a, b, 0.0)) {
        return result;
    }
    // Everything to the diagonal is always feasible.
    double hi = 0.0;
    for (const auto* side : {&a, &b}) {
        for (const auto& p : *side) {
            hi = std::max(hi, p.half_persistence);
        }
    }
    // Feasibility only changes where c crosses a pairwise cost or a half
    // persistence, so the smallest feasible double is exactly one of those
    // candidates. Bisect over the ordered bit patterns of non-negative doubles.
    auto lo_bits = std::bit_cast<std::uint64_t>(0.0);
    auto hi_bits = std::bit_cast<std::uint64_t>(hi);
    while (hi_bits - lo_bits > 1) {
        const std::uint64_t mid = lo_bits + (hi_bits - lo_bits) / 2;
        if (feasible(a, b, std::bit_cast<double>(mid))) {
            hi_bits = mid;
        } else {
            lo_bits = mid;
        }
    }
    result.distance = std::bit_cast<double>(hi_bits);
    return result;
}

}  // namespace actopo
