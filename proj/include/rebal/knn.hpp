#pragma once

#include <cstddef>
#include <vector>

namespace rebal {

// Exact nearest-neighbor structure over a fixed point set: the full
// Euclidean distance table, symmetric with a zero diagonal.  Quadratic in
// memory, intended for the desk-scale configurations the geometry
// diagnostics use.
class KnnIndex {
  public:
    explicit KnnIndex(std::vector<std::vector<double>> points);

    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return dim_; }
    double distance(std::size_t i, std::size_t j) const {
        return dist_[i * points_.size() + j];
    }
    const std::vector<std::vector<double>>& points() const { return points_; }

  private:
    std::vector<std::vector<double>> points_;
    std::size_t dim_ = 0;
    std::vector<double> dist_;
};

// The k indices j != i with smallest distance to point i, sorted by
// (distance, index); ties always resolve to the smallest index.
// Requires k <= n - 1.
std::vector<std::size_t> knn(const KnnIndex& index, std::size_t i,
                             std::size_t k);

// Same query without materializing a distance table; used where n is too
// large for the quadratic index.  Ordering and tie rules are identical.
std::vector<std::size_t> knn_scan(const std::vector<std::vector<double>>& pts,
                                  std::size_t i, std::size_t k);

// Largest number of points that list any single point among their k nearest
// neighbors.
std::size_t max_indegree(const KnnIndex& index, std::size_t k);

struct RkStats {
    double mean_rk = 0.0;
    double max_rk = 0.0;
};

// Mean and max over points of the distance to the k-th nearest neighbor.
RkStats rk_stats(const KnnIndex& index, std::size_t k);

// Table-free variant for large point sets; same semantics.
RkStats rk_stats_scan(const std::vector<std::vector<double>>& pts,
                      std::size_t k);

}  // namespace rebal
