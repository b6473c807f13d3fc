#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

#include "rebal/errors.hpp"
#include "rebal/logistic.hpp"
#include "rebal/mixture.hpp"
#include "rebal/stats.hpp"

namespace rebal {

// Anything exposing predict(x) -> probability; covers LogisticModel and the
// plug-in reweighting model.
template <class F>
concept Predictor = requires(const F f, std::span<const double> x) {
    { f.predict(x) } -> std::convertible_to<double>;
};

// Monte Carlo estimates against a reference model on the target mixture.
struct RiskReport {
    double excess_risk = 0.0;
    double excess_risk_se = 0.0;
    double est_error_q = 0.0;  // L2(target) distance between the predictors
    double type2_error = 0.0;  // share of class-1 draws predicted below 1/2
    std::size_t n_eval = 0;
};

// Draws n_eval i.i.d. samples from the target mixture and reports
//   excess_risk   = mean of loss(model) - loss(fstar),
//   excess_risk_se = sample std of that difference / sqrt(n_eval),
//   est_error_q    = sqrt(mean (model(x) - fstar(x))^2),
//   type2_error    = fraction of class-1 draws with model(x) < 1/2.
template <Predictor M, Predictor S>
RiskReport evaluate_risk(const M& model, const S& fstar,
                         const MixtureSpec& spec, const TargetSpec& target,
                         std::size_t n_eval, std::uint64_t seed) {
    spec.validate();
    if (n_eval < 1000) {
        throw config_error("evaluate_risk requires n_eval >= 1000");
    }
    SplitMix64 rng(seed);
    std::vector<double> x(spec.dim);
    KahanSum diff_sum;
    KahanSum diff_sq;
    KahanSum err_sq;
    std::size_t n1 = 0;
    std::size_t miss1 = 0;
    for (std::size_t i = 0; i < n_eval; ++i) {
        int y = detail::draw_labeled(spec, target.pi1_star, rng, x);
        double pm = model.predict(x);
        double ps = fstar.predict(x);
        double d = cross_entropy(y, pm) - cross_entropy(y, ps);
        diff_sum.add(d);
        diff_sq.add(d * d);
        err_sq.add((pm - ps) * (pm - ps));
        if (y == 1) {
            ++n1;
            if (pm < 0.5) ++miss1;
        }
    }
    double n = static_cast<double>(n_eval);
    RiskReport r;
    r.n_eval = n_eval;
    r.excess_risk = diff_sum.value() / n;
    double var =
        (diff_sq.value() - n * r.excess_risk * r.excess_risk) / (n - 1.0);
    r.excess_risk_se = std::sqrt(std::max(var, 0.0) / n);
    r.est_error_q = std::sqrt(err_sq.value() / n);
    r.type2_error =
        n1 ? static_cast<double>(miss1) / static_cast<double>(n1) : 0.0;
    return r;
}

}  // namespace rebal
