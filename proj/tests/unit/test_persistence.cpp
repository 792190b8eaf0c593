#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "actopo/error.hpp"
#include "actopo/persistence.hpp"
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

DistanceMatrix random_distances(oracle::Random& rng, std::size_t n, std::size_t d) {
    const auto c = oracle::random_cloud(rng, n, d, 3, 2.0);
    return DistanceMatrix(oracle::euclidean(c.points()), {});
}

std::vector<oracle::DiagramPoint> to_points(const PersistenceDiagram& d) {
    std::vector<oracle::DiagramPoint> out;
    for (const auto& p : d.pairs) {
        out.push_back({p.birth, p.death});
    }
    return out;
}

PersistenceDiagram diagram(std::vector<std::pair<double, double>> pts, std::size_t essential = 0) {
    PersistenceDiagram d;
    for (auto [b, e] : pts) {
        d.pairs.push_back({b, e, 0});
    }
    d.essential.assign(essential, 0.0);
    return d;
}

}  // namespace

TEST_SUITE("persistence") {
    TEST_CASE("three points on a line die at 1 and 2") {
        const auto r = h0_persistence(line({0, 1, 3}));
        CHECK(r.diagram.sorted_deaths() == std::vector<double>{1, 2});
        CHECK(r.diagram.essential.size() == 1);
        REQUIRE(r.tree.events.size() == 2);
        CHECK(r.tree.events[0].point_a == 0);
        CHECK(r.tree.events[0].point_b == 1);
        CHECK(r.tree.events[1].new_node == 4);
        CHECK(r.tree.events[1].new_size == 3);
    }

    TEST_CASE("coincident points die at zero") {
        const auto r = h0_persistence(line({2, 2, 2}));
        CHECK(r.diagram.sorted_deaths() == std::vector<double>{0, 0});
        CHECK(r.diagram.essential_cap() == 1.05);
    }

    TEST_CASE("single point has only an essential bar") {
        const auto r = h0_persistence(line({5}));
        CHECK(r.diagram.pairs.empty());
        CHECK(r.diagram.essential.size() == 1);
        CHECK(final_components(r.tree).components.size() == 1);
    }

    TEST_CASE("disconnected geodesic graph keeps two essential bars") {
        Matrix x(4, 1);
        x(0, 0) = 0;
        x(1, 0) = 1;
        x(2, 0) = 100;
        x(3, 0) = 101;
        const LabeledPointCloud c(x, {0, 0, 1, 1}, {"a", "b"}, "t");
        const auto r = h0_persistence(geodesic_distances(c, 1));
        CHECK(r.diagram.essential.size() == 2);
        CHECK(r.diagram.pairs.size() == 2);
        CHECK(r.tree.essential_components == 2);
    }

    TEST_CASE("finite deaths equal minimum spanning forest weights") {
        oracle::Random rng(101);
        for (int trial = 0; trial < 20; ++trial) {
            const auto d = random_distances(rng, 5 + rng.index(40), 1 + rng.index(5));
            const auto r = h0_persistence(d);
            CHECK(r.diagram.sorted_deaths() == oracle::prim_forest_weights(d.values()));
            CHECK(r.diagram.pairs.size() + r.diagram.essential.size() == d.size());
            for (const auto& p : r.diagram.pairs) {
                CHECK(p.birth == 0.0);
                CHECK(p.dimension == 0);
            }
        }
    }

    TEST_CASE("components match BFS at every threshold and refine monotonically") {
        oracle::Random rng(7);
        const auto d = random_distances(rng, 35, 2);
        const auto r = h0_persistence(d);
        std::vector<double> eps{0.0, 1e9};
        for (const auto& e : r.tree.events) {
            eps.push_back(e.threshold);
            eps.push_back(e.threshold * 0.999);
        }
        std::sort(eps.begin(), eps.end());
        std::vector<std::size_t> prev;
        for (double e : eps) {
            const auto a = components_at(r.tree, e);
            CHECK(a.component_of == oracle::bfs_components(d.values(), e));
            const auto deaths = r.diagram.sorted_deaths();
            const auto above = static_cast<std::size_t>(
                std::count_if(deaths.begin(), deaths.end(), [&](double t) { return t > e; }));
            CHECK(a.components.size() == r.diagram.essential.size() + above);
            if (!prev.empty()) {
                // Points together at a smaller threshold stay together.
                for (std::size_t i = 0; i < prev.size(); ++i) {
                    for (std::size_t j = i + 1; j < prev.size(); ++j) {
                        if (prev[i] == prev[j]) {
                            CHECK(a.component_of[i] == a.component_of[j]);
                        }
                    }
                }
            }
            prev = a.component_of;
        }
    }

    TEST_CASE("deaths are equivariant under point permutation") {
        oracle::Random rng(55);
        const auto d = random_distances(rng, 25, 3);
        std::vector<std::size_t> perm(25);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng.gen);
        Matrix p(25, 25);
        for (std::size_t i = 0; i < 25; ++i) {
            for (std::size_t j = 0; j < 25; ++j) {
                p(i, j) = d(perm[i], perm[j]);
            }
        }
        CHECK(h0_persistence(d).diagram.sorted_deaths() == h0_persistence(DistanceMatrix(p, {})).diagram.sorted_deaths());
    }

    TEST_CASE("bottleneck worked examples") {
        CHECK(bottleneck_distance(diagram({{0, 1}}), diagram({{0, 1}})).distance == 0.0);
        CHECK(bottleneck_distance(diagram({{0, 1}}), diagram({{0, 1.5}})).distance == 0.5);
        CHECK(bottleneck_distance(diagram({{0, 2}}), diagram({})).distance == 1.0);
        CHECK(bottleneck_distance(diagram({}), diagram({})).distance == 0.0);
        const auto mismatch = bottleneck_distance(diagram({{0, 1}}, 1), diagram({{0, 1}}, 2));
        CHECK(mismatch.essential_mismatch());
        CHECK(mismatch.distance == 0.0);
    }

    TEST_CASE("bottleneck matches exhaustive matching and is symmetric") {
        oracle::Random rng(77);
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<std::pair<double, double>> a, b;
            const std::size_t na = rng.index(6), nb = rng.index(6);
            for (std::size_t i = 0; i < na; ++i) {
                a.emplace_back(0.0, rng.uniform(0, 3));
            }
            for (std::size_t i = 0; i < nb; ++i) {
                b.emplace_back(0.0, rng.uniform(0, 3));
            }
            const auto da = diagram(a), db = diagram(b);
            const double got = bottleneck_distance(da, db).distance;
            CHECK(got == doctest::Approx(oracle::brute_bottleneck(to_points(da), to_points(db))).epsilon(1e-12));
            CHECK(got == bottleneck_distance(db, da).distance);
        }
    }

    TEST_CASE("bottleneck between persistence of nearby clouds is at most the perturbation") {
        oracle::Random rng(3);
        const auto c = oracle::random_cloud(rng, 30, 2, 2);
        Matrix y = c.points();
        for (double& v : y.data()) {
            v += rng.uniform(-0.01, 0.01);
        }
        const auto a = h0_persistence(DistanceMatrix(oracle::euclidean(c.points()), {}));
        const auto b = h0_persistence(DistanceMatrix(oracle::euclidean(y), {}));
        CHECK(bottleneck_distance(a.diagram, b.diagram).distance <= 0.02 * std::sqrt(2.0) + 1e-12);
    }
}
