#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace rebal {

// Probability clipping floor.  Keeps the cross-entropy loss uniformly
// bounded while perturbing predictions by at most 1e-6.
inline constexpr double kDefaultClipEps = 1e-6;

// Affine logistic probability model: predict(x) = sigmoid(w.x + b), with the
// output clamped to [clip_eps, 1 - clip_eps].
struct LogisticModel {
    std::vector<double> w;
    double b = 0.0;
    double clip_eps = kDefaultClipEps;

    std::size_t dim() const { return w.size(); }

    double logit(std::span<const double> x) const {
        double z = b;
        for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
        return z;
    }

    double predict(std::span<const double> x) const {
        double p = 1.0 / (1.0 + std::exp(-logit(x)));
        if (p < clip_eps) return clip_eps;
        if (p > 1.0 - clip_eps) return 1.0 - clip_eps;
        return p;
    }
};

// Cross-entropy loss -y*ln(p) - (1-y)*ln(1-p).  Requires p in (0,1); the
// clipped model guarantees that for its own predictions.
double cross_entropy(int y, double p);

// Training observation for weighted ERM.
struct WeightedSample {
    std::vector<double> x;
    int y = 0;
    double weight = 0.0;
};

}  // namespace rebal
