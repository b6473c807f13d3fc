#include "rebal/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rebal/errors.hpp"
#include "rebal/prng.hpp"
#include "rebal/stats.hpp"

namespace rebal {

namespace {

constexpr double kMassTol = 1e-12;

// Union of atom supports, keyed by exact coordinates: value[0] = first
// dist's mass, value[1] = second's, value[2] = third's (when present).
using AtomTable = std::map<std::vector<double>, std::array<double, 3>>;

void merge_into(AtomTable& table, const DiscreteDist& d, std::size_t slot) {
    for (const auto& a : d.atoms) {
        auto [it, fresh] = table.try_emplace(a.point);
        if (fresh) it->second = {0.0, 0.0, 0.0};
        it->second[slot] += a.mass;
    }
}

}  // namespace

void DiscreteDist::validate() const {
    KahanSum total;
    std::map<std::vector<double>, int> seen;
    std::size_t dim = atoms.empty() ? 0 : atoms.front().point.size();
    for (const auto& a : atoms) {
        if (a.point.size() != dim) {
            throw config_error("discrete distribution atoms disagree on dimension");
        }
        if (!(a.mass >= 0.0)) {
            throw config_error("discrete distribution has a negative atom mass");
        }
        if (++seen[a.point] > 1) {
            throw config_error("discrete distribution has duplicate atom points");
        }
        total.add(a.mass);
    }
    if (std::abs(total.value() - 1.0) > kMassTol) {
        throw config_error("discrete distribution masses do not sum to 1");
    }
}

DiscreteDist DiscreteDist::from_masses(const std::vector<double>& masses) {
    DiscreteDist d;
    d.atoms.reserve(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i) {
        d.atoms.push_back(Atom{{static_cast<double>(i)}, masses[i]});
    }
    d.validate();
    return d;
}

DiscreteDist DiscreteDist::from_points(std::vector<std::vector<double>> points,
                                       const std::vector<double>& masses) {
    if (points.size() != masses.size()) {
        throw config_error("points and masses differ in length");
    }
    DiscreteDist d;
    d.atoms.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        d.atoms.push_back(Atom{std::move(points[i]), masses[i]});
    }
    d.validate();
    return d;
}

double DiscreteDist::mass_at(const std::vector<double>& point) const {
    for (const auto& a : atoms) {
        if (a.point == point) return a.mass;
    }
    return 0.0;
}

std::size_t CouplingTrace::mismatches() const {
    std::size_t m = 0;
    for (const auto& p : pairs) m += p.matched ? 0 : 1;
    return m;
}

double CouplingTrace::mismatch_fraction() const {
    if (pairs.empty()) return 0.0;
    return static_cast<double>(mismatches()) / static_cast<double>(pairs.size());
}

double tv_discrete(const DiscreteDist& p, const DiscreteDist& q) {
    p.validate();
    q.validate();
    AtomTable table;
    merge_into(table, p, 0);
    merge_into(table, q, 1);
    KahanSum sum;
    for (const auto& [point, mass] : table) {
        sum.add(std::abs(mass[0] - mass[1]));
    }
    return 0.5 * sum.value();
}

double chi2_discrete(const DiscreteDist& p_tilde, const DiscreteDist& p1,
                     const DiscreteDist& q) {
    p_tilde.validate();
    p1.validate();
    q.validate();
    AtomTable table;
    merge_into(table, p_tilde, 0);
    merge_into(table, p1, 1);
    merge_into(table, q, 2);
    KahanSum sum;
    bool divergent = false;
    for (const auto& [point, mass] : table) {
        double pt = mass[0], pc = mass[1], qa = mass[2];
        if (qa == 0.0) {
            if (pt > 0.0) {
                throw absolute_continuity_error(
                    "p_tilde puts mass on an atom with zero q-mass; its "
                    "density w.r.t. q does not exist");
            }
            if (pc > 0.0) {
                throw absolute_continuity_error(
                    "p1 puts mass on an atom with zero q-mass; its density "
                    "w.r.t. q does not exist");
            }
            continue;
        }
        if (pt == pc) continue;  // covers the 0/0 = 0 convention
        if (pc == 0.0) {
            divergent = true;  // p_tilde-mass where p1 has none, under q
            continue;
        }
        double diff = pt - pc;
        sum.add(diff * diff / pc);
    }
    if (divergent) return std::numeric_limits<double>::infinity();
    return sum.value();
}

namespace {

// Inverse-CDF draw over (point, mass) rows in their stored order.  The
// final row absorbs any floating-point shortfall in the cumulative sum.
const std::vector<double>& draw_atom(
    const std::vector<std::pair<const std::vector<double>*, double>>& rows,
    double total, SplitMix64& rng) {
    double r = rng.next_uniform() * total;
    double cum = 0.0;
    for (const auto& [pt, mass] : rows) {
        cum += mass;
        if (r < cum) return *pt;
    }
    return *rows.back().first;
}

}  // namespace

CouplingTrace maximal_coupling_sample(const DiscreteDist& p1,
                                      const DiscreteDist& p2, std::size_t n,
                                      std::uint64_t seed) {
    if (n == 0) throw config_error("maximal_coupling_sample requires n >= 1");
    p1.validate();
    p2.validate();
    AtomTable table;
    merge_into(table, p1, 0);
    merge_into(table, p2, 1);

    std::vector<std::pair<const std::vector<double>*, double>> rows1;
    std::vector<std::pair<const std::vector<double>*, double>> residual;
    std::map<const std::vector<double>*, double> accept;  // mu(a)/p1(a)
    for (const auto& [point, mass] : table) {
        double m1 = mass[0], m2 = mass[1];
        double mu = std::min(m1, m2);
        if (m1 > 0.0) {
            rows1.emplace_back(&point, m1);
            accept[&point] = mu / m1;
        }
        if (m2 > mu) residual.emplace_back(&point, m2 - mu);
    }
    double residual_total = 0.0;
    for (const auto& [pt, mass] : residual) residual_total += mass;

    SplitMix64 rng(seed);
    CouplingTrace trace;
    trace.pairs.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        CouplingPair pair;
        const std::vector<double>& u1 = draw_atom(rows1, 1.0, rng);
        pair.u1 = u1;
        double v = rng.next_uniform();
        if (v <= accept.at(&u1) || residual.empty()) {
            // Identical distributions make every acceptance ratio 1, so the
            // residual branch is unreachable and residual.empty() is a pure
            // safeguard against that same case.
            pair.u2 = u1;
            pair.matched = true;
        } else {
            pair.u2 = draw_atom(residual, residual_total, rng);
            pair.matched = false;
        }
        trace.pairs.push_back(std::move(pair));
    }
    return trace;
}

double population_minimizer(const MixtureSpec& spec, const Density& syn_density,
                            std::span<const double> x) {
    spec.validate();
    if (x.size() != spec.dim) {
        throw config_error("population_minimizer point dimension mismatch");
    }
    double p0 = spec.class_density(0, x);
    double p1 = spec.class_density(1, x);
    double pt = syn_density(x);
    if (!(pt >= 0.0)) {
        throw formula_domain_error("synthetic density evaluated negative");
    }
    double c = 1.0 - 1.0 / (2.0 * spec.pi0);
    double num = 0.5 * p1 + c * (pt - p1);
    double den = 0.5 * p0 + 0.5 * p1 + c * (pt - p1);
    if (!(den > 0.0)) {
        throw formula_domain_error(
            "population minimizer denominator is nonpositive at this point");
    }
    if (num < 0.0) {
        throw formula_domain_error(
            "population minimizer value is negative at this point");
    }
    return num / den;
}

namespace {

// Sums adaptive-Simpson results over fixed panels so multi-modal integrands
// cannot fool the top-level error estimate with symmetric cancellation.
template <typename F>
double paneled_quadrature(F&& f, double lo, double hi, double tol) {
    constexpr int kPanels = 16;
    double width = (hi - lo) / kPanels;
    KahanSum total;
    for (int i = 0; i < kPanels; ++i) {
        double a = lo + i * width;
        double b = i + 1 == kPanels ? hi : a + width;
        total.add(simpson_adaptive(f, a, b, tol / kPanels));
    }
    return total.value();
}

void check_sd(double s, const char* what) {
    if (!(s > 0.0)) {
        throw domain_error(std::string(what) +
                           " requires positive standard deviations");
    }
}

// Points where the two normal densities are equal, i.e. the real roots of
// log p1(x) - log p2(x) = 0, a quadratic in x.  0, 1, or 2 points.
std::vector<double> gaussian_crossings(double m1, double s1, double m2,
                                       double s2) {
    double a = 0.5 / (s2 * s2) - 0.5 / (s1 * s1);
    double b = m1 / (s1 * s1) - m2 / (s2 * s2);
    double c = 0.5 * m2 * m2 / (s2 * s2) - 0.5 * m1 * m1 / (s1 * s1) +
               std::log(s2 / s1);
    std::vector<double> roots;
    if (std::abs(a) < 1e-300) {  // equal spreads: linear equation
        if (std::abs(b) > 0.0) roots.push_back(-c / b);
        return roots;
    }
    double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) return roots;  // tangent or disjoint: no sign change
    double root = std::sqrt(disc);
    // Citardauq pairing keeps both roots accurate when b ~ +-root.
    double q = -0.5 * (b + std::copysign(root, b));
    roots.push_back(q / a);
    if (std::abs(q) > 0.0) roots.push_back(c / q);
    return roots;
}

}  // namespace

double tv_continuous_1d(double m1, double s1, double m2, double s2) {
    check_sd(s1, "tv_continuous_1d");
    check_sd(s2, "tv_continuous_1d");
    double smax = std::max(s1, s2);
    double lo = std::min(m1, m2) - 10.0 * smax;
    double hi = std::max(m1, m2) + 10.0 * smax;
    auto f = [&](double x) {
        return std::abs(normal_pdf(x, m1, s1) - normal_pdf(x, m2, s2));
    };
    // |p1 - p2| has kinks where the densities cross; integrating each smooth
    // piece separately keeps the adaptive error estimate honest there.
    std::vector<double> cuts{lo};
    for (double c : gaussian_crossings(m1, s1, m2, s2)) {
        if (c > lo && c < hi) cuts.push_back(c);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    KahanSum total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total.add(paneled_quadrature(f, cuts[i], cuts[i + 1],
                                     1e-8 / (cuts.size() - 1)));
    }
    return 0.5 * total.value();
}

double chi2_continuous_1d(double m_tilde, double s_tilde, double m1,
                          double s1) {
    check_sd(s_tilde, "chi2_continuous_1d");
    check_sd(s1, "chi2_continuous_1d");
    if (s_tilde * s_tilde >= 2.0 * s1 * s1) {
        // (p_tilde)^2 / p1 then fails to be integrable.
        return std::numeric_limits<double>::infinity();
    }
    double smax = std::max(s_tilde, s1);
    double lo = std::min(m_tilde, m1) - 10.0 * smax;
    double hi = std::max(m_tilde, m1) + 10.0 * smax;
    auto f = [&](double x) {
        double diff = normal_pdf(x, m_tilde, s_tilde) - normal_pdf(x, m1, s1);
        return diff * diff / normal_pdf(x, m1, s1);
    };
    return paneled_quadrature(f, lo, hi, 1e-8);
}

}  // namespace rebal
