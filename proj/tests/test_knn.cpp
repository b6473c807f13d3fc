// Exact nearest-neighbor queries: hand-checked examples, the tie rule,
// agreement between the table-backed and rescanning variants, in-degree,
// and k-th-neighbor distance statistics.

#include <doctest.h>

#include <cstdint>
#include <vector>

#include "rebal/errors.hpp"
#include "rebal/knn.hpp"
#include "rebal/prng.hpp"

using namespace rebal;

namespace {

std::vector<std::vector<double>> line(std::initializer_list<double> xs) {
    std::vector<std::vector<double>> pts;
    for (double x : xs) pts.push_back({x});
    return pts;
}

std::vector<std::vector<double>> cloud(std::uint64_t seed, std::size_t n,
                                       std::size_t d) {
    SplitMix64 rng(seed);
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    for (auto& p : pts) {
        for (double& v : p) v = rng.next_normal();
    }
    return pts;
}

}  // namespace

TEST_CASE("hand-checked neighbors on a line") {
    KnnIndex index(line({0.0, 1.0, 2.0, 3.0}));
    CHECK(knn(index, 1, 2) == std::vector<std::size_t>{0, 2});
    CHECK(knn(index, 0, 1) == std::vector<std::size_t>{1});
    CHECK(knn(index, 0, 3) == std::vector<std::size_t>{1, 2, 3});
    CHECK(knn(index, 3, 2) == std::vector<std::size_t>{2, 1});
}

TEST_CASE("distance ties resolve to the smallest index") {
    KnnIndex index(line({0.0, 1.0, 2.0}));
    // Point 1 is equidistant from 0 and 2.
    CHECK(knn(index, 1, 1) == std::vector<std::size_t>{0});

    // A duplicated point is its twin's nearest neighbor at distance zero.
    KnnIndex dup(line({0.0, 0.0, 5.0}));
    CHECK(knn(dup, 0, 1) == std::vector<std::size_t>{1});
    CHECK(knn(dup, 1, 1) == std::vector<std::size_t>{0});
    CHECK(knn(dup, 0, 2) == std::vector<std::size_t>{1, 2});
    CHECK(knn(dup, 2, 1) == std::vector<std::size_t>{0});
}

TEST_CASE("distance table is symmetric with a zero diagonal") {
    auto pts = cloud(3, 40, 3);
    KnnIndex index(pts);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(index.distance(i, i) == 0.0);
        for (std::size_t j = 0; j < i; ++j) {
            CHECK(index.distance(i, j) == index.distance(j, i));
        }
    }
}

TEST_CASE("rescanning queries agree with the table-backed index") {
    auto pts = cloud(7, 120, 2);
    KnnIndex index(pts);
    for (std::size_t i = 0; i < pts.size(); i += 7) {
        for (std::size_t k : {1, 2, 5, 10}) {
            CHECK(knn(index, i, k) == knn_scan(pts, i, k));
        }
    }
}

TEST_CASE("in-degree on a line: the middle points absorb their flanks") {
    KnnIndex index(line({0.0, 1.0, 2.0, 3.0}));
    // 1-NN edges: 0->1, 1->0, 2->1, 3->2; point 1 is listed twice.
    CHECK(max_indegree(index, 1) == 2);
    // With k = 3 every point lists every other: in-degree n - 1.
    CHECK(max_indegree(index, 3) == 3);
}

TEST_CASE("k-th neighbor distances on a hand example") {
    KnnIndex index(line({0.0, 1.0, 3.0}));
    RkStats s1 = rk_stats(index, 1);
    CHECK(s1.mean_rk == doctest::Approx((1.0 + 1.0 + 2.0) / 3.0));
    CHECK(s1.max_rk == doctest::Approx(2.0));
    RkStats s2 = rk_stats(index, 2);
    CHECK(s2.mean_rk == doctest::Approx((3.0 + 2.0 + 3.0) / 3.0));
    CHECK(s2.max_rk == doctest::Approx(3.0));

    auto pts = cloud(11, 80, 2);
    KnnIndex big(pts);
    for (std::size_t k : {1, 3, 7}) {
        RkStats a = rk_stats(big, k);
        RkStats b = rk_stats_scan(pts, k);
        CHECK(a.mean_rk == doctest::Approx(b.mean_rk).epsilon(1e-13));
        CHECK(a.max_rk == doctest::Approx(b.max_rk).epsilon(1e-13));
    }
}

TEST_CASE("rk is nondecreasing in k") {
    auto pts = cloud(13, 60, 3);
    KnnIndex index(pts);
    double prev = 0.0;
    for (std::size_t k = 1; k < 10; ++k) {
        RkStats s = rk_stats(index, k);
        CHECK(s.mean_rk >= prev);
        prev = s.mean_rk;
    }
}

TEST_CASE("query validation") {
    KnnIndex index(line({0.0, 1.0, 2.0}));
    CHECK_THROWS_AS(knn(index, 0, 0), domain_error);
    CHECK_THROWS_AS(knn(index, 0, 3), domain_error);
    CHECK_THROWS_AS(knn(index, 5, 1), domain_error);
    CHECK_THROWS_AS(max_indegree(index, 0), domain_error);
    CHECK_THROWS_AS(rk_stats(index, 3), domain_error);

    auto build = [](std::vector<std::vector<double>> pts) {
        return KnnIndex(std::move(pts));
    };
    CHECK_THROWS_AS(build({}), config_error);
    CHECK_THROWS_AS(build({{1.0, 2.0}, {3.0}}), config_error);
    CHECK_THROWS_AS(build({{}, {}}), config_error);
}
