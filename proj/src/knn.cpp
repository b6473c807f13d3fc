#include "rebal/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rebal/errors.hpp"

namespace rebal {

namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double d = a[j] - b[j];
        s += d * d;
    }
    return std::sqrt(s);
}

void check_query(std::size_t n, std::size_t i, std::size_t k) {
    if (i >= n) throw domain_error("knn query index out of range");
    if (k == 0 || k >= n) {
        throw domain_error("knn requires 1 <= k <= n - 1");
    }
}

// Selects the k smallest (distance, index) pairs; ties fall to the smaller
// index because the pair comparison is lexicographic.
std::vector<std::size_t> select_k(std::vector<std::pair<double, std::size_t>>& c,
                                  std::size_t k) {
    std::partial_sort(c.begin(), c.begin() + k, c.end());
    std::vector<std::size_t> out(k);
    for (std::size_t t = 0; t < k; ++t) out[t] = c[t].second;
    return out;
}

}  // namespace

KnnIndex::KnnIndex(std::vector<std::vector<double>> points)
    : points_(std::move(points)) {
    if (points_.empty()) {
        throw config_error("KnnIndex requires a nonempty point set");
    }
    dim_ = points_[0].size();
    if (dim_ == 0) throw config_error("KnnIndex points need dimension >= 1");
    for (const auto& p : points_) {
        if (p.size() != dim_) {
            throw config_error("KnnIndex points disagree on dimension");
        }
    }
    std::size_t n = points_.size();
    dist_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = euclidean(points_[i], points_[j]);
            dist_[i * n + j] = d;
            dist_[j * n + i] = d;
        }
    }
}

std::vector<std::size_t> knn(const KnnIndex& index, std::size_t i,
                             std::size_t k) {
    std::size_t n = index.size();
    check_query(n, i, k);
    std::vector<std::pair<double, std::size_t>> cand;
    cand.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        if (j != i) cand.emplace_back(index.distance(i, j), j);
    }
    return select_k(cand, k);
}

std::vector<std::size_t> knn_scan(const std::vector<std::vector<double>>& pts,
                                  std::size_t i, std::size_t k) {
    std::size_t n = pts.size();
    check_query(n, i, k);
    std::vector<std::pair<double, std::size_t>> cand;
    cand.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        if (j != i) cand.emplace_back(euclidean(pts[i], pts[j]), j);
    }
    return select_k(cand, k);
}

std::size_t max_indegree(const KnnIndex& index, std::size_t k) {
    std::size_t n = index.size();
    if (k == 0 || k >= n) {
        throw domain_error("max_indegree requires 1 <= k <= n - 1");
    }
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : knn(index, i, k)) ++indegree[j];
    }
    std::size_t best = 0;
    for (std::size_t c : indegree) best = std::max(best, c);
    return best;
}

namespace {

// Distance from point i to its k-th nearest neighbor under the shared
// (distance, index) ordering.
template <class DistFn>
double kth_distance(std::size_t n, std::size_t i, std::size_t k,
                    DistFn&& dist) {
    std::vector<std::pair<double, std::size_t>> cand;
    cand.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        if (j != i) cand.emplace_back(dist(i, j), j);
    }
    std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
    return cand[k - 1].first;
}

template <class DistFn>
RkStats rk_impl(std::size_t n, std::size_t k, DistFn&& dist) {
    if (k == 0 || k >= n) {
        throw domain_error("rk_stats requires 1 <= k <= n - 1");
    }
    RkStats out;
    for (std::size_t i = 0; i < n; ++i) {
        double r = kth_distance(n, i, k, dist);
        out.mean_rk += r;
        out.max_rk = std::max(out.max_rk, r);
    }
    out.mean_rk /= static_cast<double>(n);
    return out;
}

}  // namespace

RkStats rk_stats(const KnnIndex& index, std::size_t k) {
    return rk_impl(index.size(), k, [&](std::size_t i, std::size_t j) {
        return index.distance(i, j);
    });
}

RkStats rk_stats_scan(const std::vector<std::vector<double>>& pts,
                      std::size_t k) {
    return rk_impl(pts.size(), k, [&](std::size_t i, std::size_t j) {
        return euclidean(pts[i], pts[j]);
    });
}

}  // namespace rebal
