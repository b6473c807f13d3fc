#pragma once

// Computable divergences (total variation, chi-squared) between finitely
// supported distributions, a maximal-coupling sampler whose mismatch rate
// realizes the TV distance, the population minimizer of the synthetic-
// augmented risk, and 1-D Gaussian TV/chi-squared by quadrature.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rebal/mixture.hpp"

namespace rebal {

// A finitely supported probability distribution on R^d.  Atom identity is
// exact coordinate equality: these objects arise from empirical measures,
// where repeated atoms are bitwise-equal, so no fuzzy matching is wanted.
// Callers quantize beforehand if they need approximate matching.
struct DiscreteDist {
    struct Atom {
        std::vector<double> point;
        double mass = 0.0;
    };
    std::vector<Atom> atoms;

    // Enforces: masses nonnegative and summing to 1 within 1e-12, atom
    // points pairwise distinct and of equal dimension.  Throws config_error.
    void validate() const;

    // Atoms at the 1-D points 0,1,2,... with the given masses.
    static DiscreteDist from_masses(const std::vector<double>& masses);
    static DiscreteDist from_points(std::vector<std::vector<double>> points,
                                    const std::vector<double>& masses);

    // Mass at an exactly matching point; 0 if absent.
    double mass_at(const std::vector<double>& point) const;
};

struct CouplingPair {
    std::vector<double> u1;
    std::vector<double> u2;
    bool matched = false;  // true iff u1 == u2, guaranteed by construction
};

struct CouplingTrace {
    std::vector<CouplingPair> pairs;
    std::size_t mismatches() const;
    double mismatch_fraction() const;
};

// (1/2) * sum over the union of atoms of |p(a) - q(a)|.
double tv_discrete(const DiscreteDist& p, const DiscreteDist& q);

// Chi-squared-type divergence between p_tilde and p1 with densities taken
// w.r.t. q: sum_a q(a) * (p_tilde(a)/q(a) - p1(a)/q(a))^2 / (p1(a)/q(a)),
// with the convention 0/0 = 0.  Algebraically the q factors cancel and each
// term is (p_tilde(a) - p1(a))^2 / p1(a) over atoms carrying q-mass.
// Returns +infinity when some atom has p_tilde != p1 but p1 = 0 < q (the
// divergence is vacuous, not invalid).  Throws absolute_continuity_error
// when p_tilde or p1 puts mass where q has none: the densities w.r.t. q the
// formula needs do not exist there.
double chi2_discrete(const DiscreteDist& p_tilde, const DiscreteDist& p1,
                     const DiscreteDist& q);

// Draws n pairs (U1, U2) with U1 ~ p1, U2 ~ p2, coupled so that
// Pr(U1 != U2) equals tv_discrete(p1, p2): with mu(a) = min(p1(a), p2(a))
// and eta = sum_a mu(a), accept U2 = U1 when V <= mu(U1)/p1(U1) for an
// independent V ~ Uniform(0,1), otherwise draw U2 from the residual
// (p2 - mu)/(1 - eta).  The residual's support is disjoint from every atom
// that can reach the reject branch, so matched <=> u1 == u2 exactly.
CouplingTrace maximal_coupling_sample(const DiscreteDist& p1,
                                      const DiscreteDist& p2, std::size_t n,
                                      std::uint64_t seed);

using Density = std::function<double(std::span<const double>)>;

// The pointwise minimizer of the population cross-entropy when the minority
// class is augmented with synthetic draws from syn_density at the ideal
// augmentation size:
//
//     [ p1/2 + c (pt - p1) ] / [ p0/2 + p1/2 + c (pt - p1) ],
//     c = 1 - 1/(2 pi0),
//
// where p0, p1 are the class-conditional densities at x and pt the synthetic
// density.  A nonpositive denominator or a negative numerator (possible for
// pathological synthetic densities) throws formula_domain_error; the value
// is surfaced as an error rather than clamped.
double population_minimizer(const MixtureSpec& spec, const Density& syn_density,
                            std::span<const double> x);

// TV and chi-squared between 1-D Gaussians by adaptive Simpson quadrature
// on [min mean - 10 max sd, max mean + 10 max sd], absolute tolerance 1e-8.
// chi2_continuous_1d integrates (p_tilde - p1)^2 / p1 and returns +infinity
// when s_tilde^2 >= 2 s1^2 (the integral diverges).  Nonpositive standard
// deviations throw domain_error.
double tv_continuous_1d(double m1, double s1, double m2, double s2);
double chi2_continuous_1d(double m_tilde, double s_tilde, double m1, double s1);

}  // namespace rebal
