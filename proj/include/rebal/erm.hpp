#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rebal/logistic.hpp"

namespace rebal {

// Full-batch gradient descent with Armijo backtracking.  The objective is
// the weight-normalized empirical cross-entropy of the clipped logistic
// model plus an optional ridge term on w:
//   R(w, b) = sum_i (weight_i / W) * loss_i  +  (ridge_lambda / 2) |w|^2.
// Normalizing by W = sum of weights makes the argmin, the step sizes, and
// the gradient tolerance all invariant to rescaling the weights.
struct OptimizerSettings {
    double grad_tol = 1e-8;
    std::size_t max_iters = 10000;
    double ridge_lambda = 0.0;
    double clip_eps = kDefaultClipEps;
    double armijo_beta = 0.5;
    double armijo_c = 1e-4;
};

struct ErmStatus {
    std::size_t iters = 0;
    double grad_norm = 0.0;
    bool ridge_fallback = false;  // set by pipeline retry logic, not here
};

// Optimization ran out of iterations before the gradient tolerance was met.
// Carries the last iterate so callers can inspect or salvage it.
struct convergence_error : std::runtime_error {
    LogisticModel last;
    std::size_t iters;
    double grad_norm;

    convergence_error(const std::string& msg, LogisticModel m,
                      std::size_t it, double g)
        : std::runtime_error(msg), last(std::move(m)), iters(it), grad_norm(g) {}
};

// Minimizes the objective above from the given initial model.  The problem
// is convex, so the gradient criterion identifies the global minimizer up
// to tolerance.  Throws degenerate_separation_error when the positive-weight
// samples carry only one label, config_error when all weights are zero, and
// convergence_error after max_iters unsuccessful iterations.
LogisticModel erm_train(const std::vector<WeightedSample>& data,
                        const LogisticModel& init,
                        const OptimizerSettings& opts,
                        ErmStatus* status = nullptr);

// Same, starting from the intercept-only optimum: w = 0, b = log(W1 / W0)
// with W_y the total weight of class y.
LogisticModel erm_train(const std::vector<WeightedSample>& data,
                        const OptimizerSettings& opts,
                        ErmStatus* status = nullptr);

}  // namespace rebal
