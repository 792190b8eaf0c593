#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "actopo/error.hpp"
#include "actopo/ordering.hpp"
#include "oracles.hpp"

using namespace actopo;

namespace {

DistanceMatrix line(const std::vector<double>& xs) {
    Matrix x(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        x(i, 0) = xs[i];
    }
    return DistanceMatrix(oracle::euclidean(x), {});
}

// Direct bandwidth over every pair, independent of the library helper.
std::size_t brute_bandwidth(const Adjacency& adj, const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> pos(perm.size());
    for (std::size_t p = 0; p < perm.size(); ++p) {
        pos[perm[p]] = p;
    }
    std::size_t bw = 0;
    for (std::size_t i = 0; i < adj.size(); ++i) {
        for (std::size_t j : adj[i]) {
            bw = std::max(bw, pos[i] > pos[j] ? pos[i] - pos[j] : pos[j] - pos[i]);
        }
    }
    return bw;
}

bool is_permutation_of_n(std::vector<std::size_t> p) {
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] != i) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("ordering") {
    TEST_CASE("collinear 1-NN graph is a path") {
        const auto adj = knn_adjacency(line({0, 1, 3}), 1);
        CHECK(adj[0] == std::vector<std::size_t>{1});
        CHECK(adj[1] == std::vector<std::size_t>{0, 2});
        CHECK(adj[2] == std::vector<std::size_t>{1});
    }

    TEST_CASE("equilateral ties pick the lower index") {
        Matrix d(3, 3, 1.0);
        for (std::size_t i = 0; i < 3; ++i) {
            d(i, i) = 0.0;
        }
        const auto adj = knn_adjacency(DistanceMatrix(d, {}), 1);
        // 0 -> 1, 1 -> 0, 2 -> 0
        CHECK(adj[0] == std::vector<std::size_t>{1, 2});
        CHECK(adj[1] == std::vector<std::size_t>{0});
        CHECK(adj[2] == std::vector<std::size_t>{0});
        CHECK_THROWS_AS((void)knn_adjacency(DistanceMatrix(d, {}), 3), ParameterError);
    }

    TEST_CASE("knn adjacency matches the oracle union graph") {
        oracle::Random rng(3);
        const auto c = oracle::random_cloud(rng, 25, 3, 2);
        const Matrix d = oracle::euclidean(c.points());
        const auto adj = knn_adjacency(DistanceMatrix(d, {}), 4);
        const auto ref = oracle::knn_union(d, 4);
        for (std::size_t i = 0; i < 25; ++i) {
            for (std::size_t j = 0; j < 25; ++j) {
                const bool has = std::find(adj[i].begin(), adj[i].end(), j) != adj[i].end();
                CHECK(has == bool(ref[i][j]));
            }
        }
    }

    TEST_CASE("shuffled path recovers bandwidth 1, and again when reapplied") {
        oracle::Random rng(8);
        const std::size_t n = 30;
        std::vector<std::size_t> label(n);
        std::iota(label.begin(), label.end(), 0);
        std::shuffle(label.begin(), label.end(), rng.gen);
        Adjacency adj(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            adj[label[i]].push_back(label[i + 1]);
            adj[label[i + 1]].push_back(label[i]);
        }
        for (auto& row : adj) {
            std::sort(row.begin(), row.end());
        }
        const auto o = rcm_order(adj, "path");
        CHECK(is_permutation_of_n(o.permutation));
        CHECK(o.bandwidth_after == 1);
        CHECK(brute_bandwidth(adj, o.permutation) == 1);
        std::vector<std::size_t> identity(n);
        std::iota(identity.begin(), identity.end(), 0);
        CHECK(o.bandwidth_before == brute_bandwidth(adj, identity));

        // Relabel by the produced order and run again.
        std::vector<std::size_t> pos(n);
        for (std::size_t p = 0; p < n; ++p) {
            pos[o.permutation[p]] = p;
        }
        Adjacency re(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j : adj[i]) {
                re[pos[i]].push_back(pos[j]);
            }
        }
        for (auto& row : re) {
            std::sort(row.begin(), row.end());
        }
        CHECK(rcm_order(re).bandwidth_after == 1);
    }

    TEST_CASE("star graph bandwidth is checked directly") {
        Adjacency star(5);
        for (std::size_t leaf = 1; leaf < 5; ++leaf) {
            star[0].push_back(leaf);
            star[leaf].push_back(0);
        }
        const auto o = rcm_order(star);
        CHECK(is_permutation_of_n(o.permutation));
        CHECK(o.bandwidth_after == brute_bandwidth(star, o.permutation));
        CHECK(o.bandwidth_after == bandwidth(star, o.permutation));
        // Best possible for a 5-star puts the hub in the middle: bandwidth 2.
        CHECK(o.bandwidth_after >= 2);
    }

    TEST_CASE("empty and disconnected graphs") {
        const auto empty = rcm_order(Adjacency(4));
        CHECK(is_permutation_of_n(empty.permutation));
        CHECK(empty.bandwidth_after == 0);
        Adjacency two(4);
        two[0] = {3};
        two[3] = {0};
        two[1] = {2};
        two[2] = {1};
        const auto o = rcm_order(two);
        CHECK(o.bandwidth_after == 1);
        Adjacency bad(2);
        bad[0] = {1};
        CHECK_THROWS_AS((void)rcm_order(bad), ParameterError);
    }

    TEST_CASE("linkage of three collinear points") {
        const auto r = h0_persistence(line({0, 1, 3}));
        const auto o = rcm_order(knn_adjacency(line({0, 1, 3}), 1));
        const auto link = linkage_from_tree(r.tree, o);
        REQUIRE(link.rows.size() == 2);
        CHECK(link.rows[0].left == 0);
        CHECK(link.rows[0].right == 1);
        CHECK(link.rows[0].height == 1.0);
        CHECK(link.rows[0].size == 2);
        CHECK(link.rows[1].left == 3);
        CHECK(link.rows[1].right == 2);
        CHECK(link.rows[1].height == 2.0);
        CHECK(link.rows[1].size == 3);
        CHECK(is_permutation_of_n(link.leaf_order));
    }

    TEST_CASE("single point linkage") {
        const auto r = h0_persistence(line({4}));
        const auto link = linkage_from_tree(r.tree, rcm_order(Adjacency(1)));
        CHECK(link.rows.empty());
        CHECK(link.leaf_order == std::vector<std::size_t>{0});
        CHECK(link.rcm_adjacency_kept == 1.0);
    }

    TEST_CASE("every subtree is contiguous in leaf order and heights never decrease") {
        oracle::Random rng(19);
        const auto c = oracle::random_cloud(rng, 40, 2, 3, 1.5);
        const DistanceMatrix d(oracle::euclidean(c.points()), {});
        const auto r = h0_persistence(d);
        const auto link = linkage_from_tree(r.tree, rcm_order(knn_adjacency(d, 5)));
        REQUIRE(is_permutation_of_n(link.leaf_order));
        std::vector<std::size_t> pos(40);
        for (std::size_t p = 0; p < 40; ++p) {
            pos[link.leaf_order[p]] = p;
        }
        for (std::size_t e = 0; e < r.tree.events.size(); ++e) {
            const auto leaves = subtree_leaves(r.tree, 40 + e);
            CHECK(leaves.size() == r.tree.events[e].new_size);
            std::size_t lo = 40, hi = 0;
            for (std::size_t leaf : leaves) {
                lo = std::min(lo, pos[leaf]);
                hi = std::max(hi, pos[leaf]);
            }
            CHECK(hi - lo + 1 == leaves.size());
            if (e > 0) {
                CHECK(link.rows[e].height >= link.rows[e - 1].height);
            }
        }
        CHECK(link.rcm_adjacency_kept >= 0.0);
        CHECK(link.rcm_adjacency_kept <= 1.0);
    }
}
