#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "actopo/color_ramp.hpp"
#include "actopo/error.hpp"
#include "actopo/geometry.hpp"
#include "actopo/palette.hpp"
#include "actopo/scenes.hpp"
#include "actopo/svg.hpp"
#include "oracles.hpp"

using namespace actopo;
using nlohmann::json;

namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) {
        ++n;
    }
    return n;
}

Matrix blobs(oracle::Random& rng, std::size_t classes, std::size_t per, double gap, std::vector<int>& labels) {
    Matrix x(classes * per, 2);
    labels.assign(classes * per, 0);
    for (std::size_t i = 0; i < classes * per; ++i) {
        labels[i] = static_cast<int>(i / per);
        x(i, 0) = rng.uniform(0, 1) + gap * static_cast<double>(labels[i]);
        x(i, 1) = rng.uniform(0, 1) + (labels[i] % 2 == 0 ? 0.0 : gap);
    }
    return x;
}

struct Pipeline {
    DistanceMatrix d;
    PersistenceResult r;
    OptimalThresholds opt;
};

Pipeline run(const Matrix& x, const std::vector<int>& labels) {
    DistanceMatrix d(oracle::euclidean(x), {});
    auto r = h0_persistence(d);
    auto opt = optimal_thresholds(r.tree, labels);
    return {std::move(d), std::move(r), std::move(opt)};
}

}  // namespace

TEST_SUITE("viz") {
    TEST_CASE("PCA of collinear data explains everything on the first axis") {
        Matrix x(5, 2);
        for (std::size_t i = 0; i < 5; ++i) {
            x(i, 0) = static_cast<double>(i);
            x(i, 1) = 2.0 * static_cast<double>(i);
        }
        const auto p = pca_project(x);
        CHECK(p.explained[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(p.explained[1]) < 1e-12);
    }

    TEST_CASE("PCA of square corners splits variance evenly") {
        Matrix x(4, 2);
        x(1, 0) = 1;
        x(2, 1) = 1;
        x(3, 0) = 1;
        x(3, 1) = 1;
        const auto p = pca_project(x);
        CHECK(p.explained[0] == doctest::Approx(0.5));
        CHECK(p.explained[1] == doctest::Approx(0.5));
    }

    TEST_CASE("PCA variances match power iteration and Jacobi on a 40x6 cloud") {
        oracle::Random rng(6);
        Matrix x(40, 6);
        for (std::size_t i = 0; i < 40; ++i) {
            for (std::size_t t = 0; t < 6; ++t) {
                x(i, t) = rng.normal() * static_cast<double>(6 - t);
            }
        }
        const auto p = pca_project(x);
        const Matrix cov = oracle::covariance(x, 0.0);
        const auto jac = oracle::jacobi_eigenvalues(cov);
        const auto pow = oracle::power_eigenvalues(cov, 2, rng);
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(std::abs(p.variances[k] - jac[k]) <= 1e-8);
            CHECK(std::abs(p.variances[k] - pow[k]) <= 1e-8);
        }
        // Projected coordinates carry exactly those variances.
        for (std::size_t k = 0; k < 2; ++k) {
            double s = 0.0;
            for (const auto& c : p.coords) {
                const double v = k == 0 ? c.x : c.y;
                s += v * v;
            }
            CHECK(s / 39.0 == doctest::Approx(p.variances[k]).epsilon(1e-10));
        }
    }

    TEST_CASE("PCA of 1-D data pads the second axis") {
        Matrix x(3, 1);
        x(0, 0) = -1;
        x(2, 0) = 1;
        const auto p = pca_project(x);
        for (const auto& c : p.coords) {
            CHECK(c.y == 0.0);
        }
        CHECK(p.explained[0] == 1.0);
    }

    TEST_CASE("hull examples") {
        const auto sq = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
        CHECK(sq.size() == 4);
        CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}}).size() == 2);
        CHECK(convex_hull({{3, 3}, {3, 3}}).size() == 1);
        CHECK_THROWS((void)convex_hull({}));
        // Counter-clockwise: positive signed area.
        double area = 0.0;
        for (std::size_t i = 0; i < sq.size(); ++i) {
            const auto& a = sq[i];
            const auto& b = sq[(i + 1) % sq.size()];
            area += a.x * b.y - b.x * a.y;
        }
        CHECK(area == doctest::Approx(2.0));
    }

    TEST_CASE("hull contains every input point by an orientation test") {
        oracle::Random rng(31);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<Point2> pts;
            const std::size_t n = 3 + rng.index(50);
            for (std::size_t i = 0; i < n; ++i) {
                pts.push_back({rng.normal(), rng.normal()});
            }
            const auto hull = convex_hull(pts);
            std::vector<std::pair<double, double>> h;
            for (const auto& v : hull) {
                h.emplace_back(v.x, v.y);
            }
            for (const auto& p : pts) {
                CHECK(oracle::orientation_inside(h, p.x, p.y, 1e-9));
                CHECK(hull_contains(hull, p));
            }
            CHECK_FALSE(hull_contains(hull, {100.0, 100.0}));
        }
    }

    TEST_CASE("separable blobs give a diagonal classes to optimum Sankey") {
        oracle::Random rng(41);
        std::vector<int> labels;
        const Matrix x = blobs(rng, 3, 20, 10.0, labels);
        const auto p = run(x, labels);
        const auto scene = build_sankey(p.r.tree, labels, p.opt.scores, false);
        CHECK(sankey_conserves(scene.payload));
        const auto& stages = scene.payload["stages"];
        // The best optimum is one of the two optimal stages; with three
        // separated blobs its partition is the classes.
        const auto& best = best_score(p.opt);
        const std::size_t s = best.epsilon == p.opt.scores.front().epsilon ? 2 : 3;
        REQUIRE(stages[s]["nodes"].size() == 3);
        for (const auto& node : stages[s]["nodes"]) {
            CHECK(node["purity"] == 1.0);
            CHECK(node["size"] == 20);
        }
        // Class -> optimum contingency is diagonal: recompute it directly.
        const auto at = components_at(p.r.tree, best.epsilon);
        std::map<std::pair<int, std::size_t>, int> table;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            ++table[{labels[i], at.component_of[i]}];
        }
        CHECK(table.size() == 3);
        CHECK(render_svg(scene).find("class=\"flow\"") != std::string::npos);
    }

    TEST_CASE("single-class cloud has one class node and single ribbons") {
        oracle::Random rng(42);
        std::vector<int> labels;
        const Matrix x = blobs(rng, 1, 15, 0.0, labels);
        const auto p = run(x, labels);
        const auto scene = build_sankey(p.r.tree, labels, p.opt.scores, false);
        CHECK(scene.payload["stages"][0]["nodes"].size() == 1);
        // Each stage-2 node is fed by exactly one ribbon carrying all its points.
        const auto& targets = scene.payload["stages"][1]["nodes"];
        std::vector<int> fed(targets.size(), 0);
        for (const auto& f : scene.payload["flows"]) {
            if (f["stage"] == 0) {
                CHECK(f["source"] == 0);
                const auto t = f["target"].get<std::size_t>();
                ++fed[t];
                CHECK(f["weight"] == targets[t]["size"]);
            }
        }
        CHECK(std::all_of(fed.begin(), fed.end(), [](int k) { return k == 1; }));
        CHECK(sankey_conserves(scene.payload));
    }

    TEST_CASE("compact Sankey collapses small clusters and still conserves") {
        oracle::Random rng(43);
        const auto c = oracle::random_cloud(rng, 60, 3, 3, 2.0);
        const auto p = run(c.points(), c.labels());
        const auto full = build_sankey(p.r.tree, c.labels(), p.opt.scores, false);
        const auto compact = build_sankey(p.r.tree, c.labels(), p.opt.scores, true);
        CHECK(sankey_conserves(full.payload));
        CHECK(sankey_conserves(compact.payload));
        CHECK(compact.kind == SceneKind::sankey_compact);
        // Stage 1 is nearly all singletons, so it collapses.
        CHECK(compact.payload["stages"][1]["nodes"].size() < full.payload["stages"][1]["nodes"].size());
        CHECK(compact.palette.contains("noise"));
        json broken = full.payload;
        broken["flows"][0]["weight"] = broken["flows"][0]["weight"].get<int>() + 1;
        CHECK_FALSE(sankey_conserves(broken));
    }

    TEST_CASE("Sankey preconditions") {
        Matrix x(1, 1);
        const auto one = h0_persistence(DistanceMatrix(x, {}));
        CHECK_THROWS_AS((void)build_sankey(one.tree, {0}, {{0, 1, 1, 1}}, false), ConstructionError);
        oracle::Random rng(44);
        const auto c = oracle::random_cloud(rng, 10, 2, 2);
        const auto p = run(c.points(), c.labels());
        auto bad = p.opt.scores;
        bad.front().epsilon = p.r.tree.events.back().threshold * 2.0;
        CHECK_THROWS_AS((void)build_sankey(p.r.tree, c.labels(), bad, false), ConstructionError);
    }

    TEST_CASE("heatmap of two blobs has dark diagonal blocks in leaf order") {
        oracle::Random rng(45);
        std::vector<int> labels;
        const Matrix x = blobs(rng, 2, 20, 10.0, labels);
        const auto p = run(x, labels);
        const auto ord = rcm_order(knn_adjacency(p.d, 4));
        const auto link = linkage_from_tree(p.r.tree, ord);
        const auto major = components_at(p.r.tree, best_score(p.opt).epsilon);
        const auto scene = build_heatmap_dendrogram(p.d, link, ord, major);
        CHECK(scene.payload["grid"] == 40);
        // Mean within-block vs cross-block, recomputed from D and leaf order.
        const auto& order = link.leaf_order;
        double within = 0, cross = 0;
        for (std::size_t a = 0; a < 40; ++a) {
            for (std::size_t b = 0; b < 40; ++b) {
                const double v = scene.payload["values"][a][b].get<double>();
                CHECK(v == p.d(order[a], order[b]));
                ((a < 20) == (b < 20) ? within : cross) += v;
            }
        }
        CHECK(within / 800.0 < cross / 800.0 / 5.0);
        CHECK(scene.payload["clusters"]["major"].size() == 2);
        const auto svg = render_svg(scene);
        CHECK(svg.find(std::string(viz::kDistanceRamp[0])) != std::string::npos);
        CHECK(svg.find(std::string(viz::kDistanceRamp[255])) != std::string::npos);
    }

    TEST_CASE("heatmap block averaging and unreachable blocks") {
        oracle::Random rng(46);
        const auto c = oracle::random_cloud(rng, 10, 2, 1);
        const auto p = run(c.points(), c.labels());
        const auto ord = rcm_order(knn_adjacency(p.d, 3));
        const auto link = linkage_from_tree(p.r.tree, ord);
        const auto scene = build_heatmap_dendrogram(p.d, link, ord, final_components(p.r.tree), {}, 3);
        CHECK(scene.payload["grid"] == 3);
        CHECK(scene.payload["bin_edges"] == json::array({0, 3, 6, 10}));
        double s = 0;
        for (std::size_t r = 6; r < 10; ++r) {
            for (std::size_t q = 0; q < 3; ++q) {
                s += p.d(link.leaf_order[r], link.leaf_order[q]);
            }
        }
        CHECK(scene.payload["values"][2][0].get<double>() == doctest::Approx(s / 12.0).epsilon(1e-14));

        Matrix x(4, 1);
        x(1, 0) = 1;
        x(2, 0) = 100;
        x(3, 0) = 101;
        const LabeledPointCloud split(x, {0, 0, 1, 1}, {"a", "b"}, "t");
        const auto g = geodesic_distances(split, 1);
        const auto gr = h0_persistence(g);
        const auto gord = rcm_order(knn_adjacency(g, 1));
        const auto gl = linkage_from_tree(gr.tree, gord);
        const auto gs = build_heatmap_dendrogram(g, gl, gord, final_components(gr.tree), {}, 2);
        CHECK(gs.payload["values"][0][1].is_null());
        CHECK(render_svg(gs).find(std::string(viz::kUnreachableColor)) != std::string::npos);
    }

    TEST_CASE("single point heatmap") {
        Matrix x(1, 3);
        const LabeledPointCloud one(x, {0}, {"a"}, "t");
        const auto d = pairwise_distances(one, {});
        const auto r = h0_persistence(d);
        const auto ord = rcm_order(Adjacency(1));
        const auto scene = build_heatmap_dendrogram(d, linkage_from_tree(r.tree, ord), ord, final_components(r.tree));
        CHECK(scene.payload["grid"] == 1);
        CHECK(scene.payload["dendrogram"]["rows"].empty());
        CHECK_NOTHROW((void)render_svg(scene));
    }

    TEST_CASE("persistence plot examples") {
        PersistenceDiagram lone;
        lone.essential = {0.0};
        const auto a = build_persistence_plots(lone);
        REQUIRE(a.barcode.payload["bars"].size() == 1);
        CHECK(a.barcode.payload["bars"][0]["essential"] == true);
        CHECK(a.barcode.payload["bars"][0]["death"] == 1.05);

        PersistenceDiagram two;
        two.pairs = {{0, 1, 0}, {0, 2, 0}};
        const auto b = build_persistence_plots(two);
        const auto& bars = b.barcode.payload["bars"];
        REQUIRE(bars.size() == 2);
        CHECK(bars[0]["death"] == 2.0);
        CHECK(bars[1]["death"] == 1.0);
        CHECK(b.diagram.payload["points"].size() == 2);
        CHECK(count_of(render_svg(b.diagram), "class=\"pair\"") == 2);
    }

    TEST_CASE("blob scene: containment, one hull path per component, determinism") {
        oracle::Random rng(47);
        std::vector<int> labels;
        const Matrix x = blobs(rng, 3, 20, 10.0, labels);
        const auto p = run(x, labels);
        const auto proj = pca_project(x);
        const auto at = components_at(p.r.tree, best_score(p.opt).epsilon);
        REQUIRE(at.components.size() == 3);
        const auto scene = build_blob(proj, labels, at);
        CHECK(blob_contained(scene.payload));
        const auto svg = render_svg(scene);
        CHECK(count_of(svg, "class=\"hull\"") == 3);
        CHECK(svg == render_svg(scene));
        CHECK(svg.rfind("<?xml", 0) == 0);
        CHECK(svg.find("viewBox=\"0 0 1000 700\"") != std::string::npos);
        CHECK(svg.find("<script") == std::string::npos);

        json moved = scene.payload;
        moved["coords"][0][0] = 1e6;
        CHECK_FALSE(blob_contained(moved));
    }

    TEST_CASE("scene JSON round trip and validation") {
        PersistenceDiagram two;
        two.pairs = {{0, 1, 0}};
        two.essential = {0.0};
        const auto plots = build_persistence_plots(two, {"euclidean", "layer", {}, {}});
        const json j = to_json(plots.barcode);
        const auto back = scene_from_json(j);
        CHECK(render_svg(back) == render_svg(plots.barcode));
        json bad = j;
        bad["kind"] = "pie";
        CHECK_THROWS_AS((void)scene_from_json(bad), RenderError);
        auto broken = plots.barcode;
        broken.payload.erase("bars");
        CHECK_THROWS_AS((void)render_svg(broken), RenderError);
    }

    TEST_CASE("palette is fixed and data independent") {
        CHECK(viz::category_color(0) == "#E69F00");
        CHECK(viz::category_color(viz::kCategoricalSize) == viz::category_color(0));
        CHECK(std::string(viz::kDistanceRamp.front()) == "#440154");
        CHECK(std::string(viz::kDistanceRamp.back()) == "#fde725");
    }
}
