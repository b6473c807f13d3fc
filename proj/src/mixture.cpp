#include "rebal/mixture.hpp"

#include <cmath>

#include "rebal/errors.hpp"
#include "rebal/stats.hpp"

namespace rebal {

MixtureSpec MixtureSpec::make(double pi0, std::vector<double> mu0,
                              std::vector<double> mu1, double sigma) {
    MixtureSpec spec;
    spec.pi0 = pi0;
    spec.pi1 = 1.0 - pi0;
    spec.mu0 = std::move(mu0);
    spec.mu1 = std::move(mu1);
    spec.sigma = sigma;
    spec.dim = spec.mu0.size();
    spec.validate();
    return spec;
}

void MixtureSpec::validate() const {
    if (!(pi0 > 0.0 && pi0 < 1.0)) {
        throw config_error("mixture prior pi0 must lie in (0,1)");
    }
    if (pi1 != 1.0 - pi0) {
        throw config_error("mixture prior pi1 must equal 1 - pi0");
    }
    if (!(sigma > 0.0)) {
        throw config_error("mixture sigma must be positive");
    }
    if (dim == 0 || mu0.size() != dim || mu1.size() != dim) {
        throw config_error("mixture means must share a positive dimension");
    }
}

double MixtureSpec::class_density(int y, std::span<const double> x) const {
    const std::vector<double>& mu = y ? mu1 : mu0;
    double p = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
        p *= normal_pdf(x[j], mu[j], sigma);
    }
    return p;
}

TargetSpec TargetSpec::make(double pi0_star) {
    if (!(pi0_star > 0.0 && pi0_star < 1.0)) {
        throw config_error("target prior pi0_star must lie in (0,1)");
    }
    return TargetSpec{pi0_star, 1.0 - pi0_star};
}

std::size_t Dataset::count(int label) const {
    std::size_t c = 0;
    for (const LabeledSample& s : samples) {
        if (s.y == label) ++c;
    }
    return c;
}

std::vector<std::size_t> Dataset::indices(int label) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].y == label) idx.push_back(i);
    }
    return idx;
}

namespace {

Dataset sample_with_prior(const MixtureSpec& spec, double pi1_draw,
                          std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw config_error("sample size must be positive");
    Dataset data;
    data.dim = spec.dim;
    data.samples.resize(n);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        data.samples[i].x.resize(spec.dim);
        data.samples[i].y = detail::draw_labeled(spec, pi1_draw, rng,
                                                 data.samples[i].x);
    }
    return data;
}

}  // namespace

Dataset sample_observed(const MixtureSpec& spec, std::size_t n,
                        std::uint64_t seed) {
    return sample_with_prior(spec, spec.pi1, n, seed);
}

Dataset sample_target(const MixtureSpec& spec, const TargetSpec& target,
                      std::size_t n, std::uint64_t seed) {
    return sample_with_prior(spec, target.pi1_star, n, seed);
}

LogisticModel fstar_gaussian(const MixtureSpec& spec) {
    spec.validate();
    LogisticModel m;
    m.w.resize(spec.dim);
    double norm0 = 0.0;
    double norm1 = 0.0;
    double s2 = spec.sigma * spec.sigma;
    for (std::size_t j = 0; j < spec.dim; ++j) {
        m.w[j] = (spec.mu1[j] - spec.mu0[j]) / s2;
        norm0 += spec.mu0[j] * spec.mu0[j];
        norm1 += spec.mu1[j] * spec.mu1[j];
    }
    m.b = (norm0 - norm1) / (2.0 * s2);
    return m;
}

LogisticModel gstar_gaussian(const MixtureSpec& spec) {
    LogisticModel m = fstar_gaussian(spec);
    m.b += std::log(spec.pi1 / spec.pi0);
    return m;
}

namespace {

// The closed forms are stated for the 1-D unit-variance model only.
double type2_delta(const MixtureSpec& spec) {
    spec.validate();
    if (spec.dim != 1) {
        throw domain_error("type-II error formulas require dim == 1");
    }
    if (spec.sigma != 1.0) {
        throw domain_error("type-II error formulas require sigma == 1");
    }
    double delta = spec.mu1[0] - spec.mu0[0];
    if (!(delta > 0.0)) {
        throw domain_error("type-II error formulas require mu1 > mu0");
    }
    return delta;
}

}  // namespace

double bayes_type2_error_observed(const MixtureSpec& spec) {
    double delta = type2_delta(spec);
    return normal_cdf(-0.5 * delta + std::log(spec.pi0 / spec.pi1) / delta);
}

double bayes_type2_error_balanced(const MixtureSpec& spec) {
    double delta = type2_delta(spec);
    return normal_cdf(-0.5 * delta);
}

}  // namespace rebal
