#include <doctest.h>

#include <omp.h>

#include <cstring>

#include "actopo/kernels.hpp"
#include "actopo/metrics.hpp"
#include "oracles.hpp"

using namespace actopo;

namespace {

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data().data(), b.data().data(), a.rows() * a.cols() * sizeof(double)) == 0;
}

Matrix random_points(std::uint64_t seed, std::size_t n, std::size_t d) {
    oracle::Random rng(seed);
    Matrix x(n, d);
    for (std::size_t i = 0; i < n * d; ++i) {
        x.data()[i] = rng.normal();
    }
    return x;
}

}  // namespace

TEST_SUITE("kernels") {
    TEST_CASE("serial and OpenMP kernels agree bitwise for 1-4 threads") {
        const Matrix x = random_points(17, 97, 7);
        const Matrix ref_e = kernels::serial::pairwise(x, kernels::PairwiseKind::euclidean);
        const Matrix ref_c = kernels::serial::pairwise(x, kernels::PairwiseKind::cosine);
        const auto graph = knn_graph(ref_e, 3);
        const Matrix ref_sp = kernels::serial::shortest_paths(graph);
        const auto ref_nn = kernels::serial::nearest_neighbors(ref_e, 5);
        const int saved = omp_get_max_threads();
        for (int threads = 1; threads <= 4; ++threads) {
            CAPTURE(threads);
            omp_set_num_threads(threads);
            CHECK(bitwise_equal(kernels::omp::pairwise(x, kernels::PairwiseKind::euclidean), ref_e));
            CHECK(bitwise_equal(kernels::omp::pairwise(x, kernels::PairwiseKind::cosine), ref_c));
            CHECK(bitwise_equal(kernels::omp::shortest_paths(graph), ref_sp));
            CHECK(kernels::omp::nearest_neighbors(ref_e, 5) == ref_nn);
        }
        omp_set_num_threads(saved);
    }

    TEST_CASE("pairwise matches a naive double loop") {
        const Matrix x = random_points(2, 20, 5);
        const Matrix e = kernels::serial::pairwise(x, kernels::PairwiseKind::euclidean);
        const Matrix c = kernels::serial::pairwise(x, kernels::PairwiseKind::cosine);
        const Matrix oe = oracle::euclidean(x);
        const Matrix oc = oracle::cosine(x);
        for (std::size_t i = 0; i < 20; ++i) {
            for (std::size_t j = 0; j < 20; ++j) {
                CHECK(std::abs(e(i, j) - oe(i, j)) <= 1e-10);
                CHECK(std::abs(c(i, j) - oc(i, j)) <= 1e-10);
                CHECK(e(i, j) == e(j, i));
                CHECK(c(i, j) == c(j, i));
            }
            CHECK(e(i, i) == 0.0);
            CHECK(c(i, i) == 0.0);
        }
    }

    TEST_CASE("nearest neighbors: ties go to the lower index, non-finite skipped") {
        Matrix d(4, 4);
        // Point 0 is equidistant from 1, 2, 3.
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                d(i, j) = i == j ? 0.0 : 1.0;
            }
        }
        d(0, 1) = d(1, 0) = oracle::kInf;
        const auto nn = kernels::serial::nearest_neighbors(d, 2);
        CHECK(nn[0] == std::vector<std::size_t>{2, 3});
        CHECK(nn[3] == std::vector<std::size_t>{0, 1});
    }

    TEST_CASE("shortest paths on a chain and across a gap") {
        kernels::WeightedGraph g;
        g.adjacency = {{{1, 1.0}}, {{0, 1.0}, {2, 2.0}}, {{1, 2.0}}, {}};
        const Matrix sp = kernels::serial::shortest_paths(g);
        CHECK(sp(0, 2) == 3.0);
        CHECK(sp(2, 0) == 3.0);
        CHECK(std::isinf(sp(0, 3)));
        CHECK(sp(3, 3) == 0.0);
    }
}
