// Nearest-neighbor geometry properties: the dimension-dependent cap on
// 1-NN in-degree, monotonicity of neighbor distances in k, and the scaling
// of the k-th-neighbor distance with sample size.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "rebal/knn.hpp"
#include "rebal/prng.hpp"

using namespace rebal;

namespace {

std::vector<std::vector<double>> uniform_cube(SplitMix64& rng, std::size_t n,
                                              std::size_t d) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    for (auto& p : pts)
        for (double& v : p) v = rng.next_uniform();
    return pts;
}

}  // namespace

TEST_CASE("1-NN in-degree never exceeds the kissing-number cap") {
    // For points in general position the number of points whose nearest
    // neighbor is a given point is at most 2 in d=1, 6 in d=2, 12 in d=3.
    const std::size_t caps[] = {0, 2, 6, 12};
    SplitMix64 rng(3001);
    for (std::size_t d = 1; d <= 3; ++d) {
        for (int cfg = 0; cfg < 120; ++cfg) {
            KnnIndex index(uniform_cube(rng, 100, d));
            CHECK(max_indegree(index, 1) <= caps[d]);
        }
    }
}

TEST_CASE("max in-degree is nondecreasing in k") {
    SplitMix64 rng(3003);
    for (int trial = 0; trial < 10; ++trial) {
        KnnIndex index(uniform_cube(rng, 60, 2));
        std::size_t prev = 0;
        for (std::size_t k = 1; k <= 6; ++k) {
            std::size_t cur = max_indegree(index, k);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("k-th neighbor distance is nondecreasing in k pointwise") {
    SplitMix64 rng(3005);
    auto pts = uniform_cube(rng, 80, 3);
    KnnIndex index(pts);
    for (std::size_t i = 0; i < pts.size(); i += 7) {
        double prev = 0.0;
        for (std::size_t k = 1; k <= 10; ++k) {
            auto nb = knn(index, i, k);
            double dk = index.distance(i, nb.back());
            CHECK(dk >= prev);
            prev = dk;
        }
    }
}

TEST_CASE("rk stats agree between table and scan implementations") {
    SplitMix64 rng(3007);
    auto pts = uniform_cube(rng, 150, 2);
    KnnIndex index(pts);
    for (std::size_t k : {1, 3, 8}) {
        RkStats a = rk_stats(index, k);
        RkStats b = rk_stats_scan(pts, k);
        CHECK(a.mean_rk == doctest::Approx(b.mean_rk).epsilon(1e-12));
        CHECK(a.max_rk == doctest::Approx(b.max_rk).epsilon(1e-12));
    }
}

TEST_CASE("mean nearest-neighbor distance scales like n^(-1/d)") {
    // On the unit square, doubling the point count four times should shrink
    // mean r_1 by about 4^(1/2) = 2; fit the log-log slope over a ladder of
    // sizes and compare with -1/d.
    SplitMix64 rng(3009);
    const std::size_t d = 2;
    std::vector<double> log_n, log_r;
    for (std::size_t n : {128, 256, 512, 1024, 2048}) {
        // average over a few replicates to tame noise
        double acc = 0.0;
        const int reps = 4;
        for (int r = 0; r < reps; ++r) {
            auto pts = uniform_cube(rng, n, d);
            acc += rk_stats_scan(pts, 1).mean_rk;
        }
        log_n.push_back(std::log(static_cast<double>(n)));
        log_r.push_back(std::log(acc / reps));
    }
    // least-squares slope
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        mx += log_n[i];
        my += log_r[i];
    }
    mx /= log_n.size();
    my /= log_n.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        sxy += (log_n[i] - mx) * (log_r[i] - my);
        sxx += (log_n[i] - mx) * (log_n[i] - mx);
    }
    double slope = sxy / sxx;
    CHECK(std::abs(slope - (-1.0 / d)) < 0.25);
}
