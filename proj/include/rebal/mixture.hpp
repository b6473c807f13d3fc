#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rebal/logistic.hpp"
#include "rebal/prng.hpp"

namespace rebal {

// Two-component Gaussian mixture with shared isotropic covariance sigma^2 I:
// labels are Bernoulli(pi1) and features are N(mu_y, sigma^2 I).  pi1 is
// stored as the derived value 1 - pi0 so the priors always sum to one.
struct MixtureSpec {
    double pi0 = 0.5;
    double pi1 = 0.5;
    std::vector<double> mu0;
    std::vector<double> mu1;
    double sigma = 1.0;
    std::size_t dim = 0;

    static MixtureSpec make(double pi0, std::vector<double> mu0,
                            std::vector<double> mu1, double sigma);

    // Throws config_error if any invariant is broken.
    void validate() const;

    // Class-conditional density of N(mu_y, sigma^2 I) at x.
    double class_density(int y, std::span<const double> x) const;
};

// Class priors of the evaluation distribution.  balanced() gives the equal
// mixture; other priors express an arbitrary rebalancing target.
struct TargetSpec {
    double pi0_star = 0.5;
    double pi1_star = 0.5;

    static TargetSpec make(double pi0_star);
    static TargetSpec balanced() { return TargetSpec{}; }
};

struct LabeledSample {
    std::vector<double> x;
    int y = 0;  // 0/1 labels, matching the loss formulas directly
};

struct Dataset {
    std::vector<LabeledSample> samples;
    std::size_t dim = 0;

    std::size_t size() const { return samples.size(); }
    std::size_t count(int label) const;
    // Index view of one class, in dataset order.
    std::vector<std::size_t> indices(int label) const;
};

namespace detail {
// Draws one labeled sample: y ~ Bernoulli(pi1_draw), x ~ N(mu_y, sigma^2 I).
// Shared by the dataset samplers and the Monte Carlo risk evaluator so all
// of them consume their streams identically.
inline int draw_labeled(const MixtureSpec& spec, double pi1_draw,
                        SplitMix64& rng, std::span<double> x) {
    int y = rng.next_uniform() < pi1_draw ? 1 : 0;
    const std::vector<double>& mu = y ? spec.mu1 : spec.mu0;
    for (std::size_t j = 0; j < spec.dim; ++j) {
        x[j] = mu[j] + spec.sigma * rng.next_normal();
    }
    return y;
}
}  // namespace detail

// n i.i.d. draws from the observed distribution (priors pi0/pi1).
Dataset sample_observed(const MixtureSpec& spec, std::size_t n,
                        std::uint64_t seed);

// n i.i.d. draws with the target priors and the same class conditionals.
Dataset sample_target(const MixtureSpec& spec, const TargetSpec& target,
                      std::size_t n, std::uint64_t seed);

// Balanced-mixture posterior in closed form:
//   w = (mu1 - mu0) / sigma^2,  b = (|mu0|^2 - |mu1|^2) / (2 sigma^2),
// so sigmoid(w.x + b) = p1(x) / (p0(x) + p1(x)) pointwise.
LogisticModel fstar_gaussian(const MixtureSpec& spec);

// Observed-mixture posterior: same w, intercept shifted by log(pi1/pi0).
LogisticModel gstar_gaussian(const MixtureSpec& spec);

// Type-II error of the Bayes classifier under the observed priors, for the
// 1-D unit-variance model with mu1 > mu0:
//   Phi(-(mu1-mu0)/2 + log(pi0/pi1)/(mu1-mu0)).
// The multivariate analog is deliberately not provided; Monte Carlo covers
// d > 1.
double bayes_type2_error_observed(const MixtureSpec& spec);

// Same model under balanced priors: Phi(-(mu1-mu0)/2), prior-independent.
double bayes_type2_error_balanced(const MixtureSpec& spec);

}  // namespace rebal
