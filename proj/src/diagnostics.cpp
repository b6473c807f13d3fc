#include "rebal/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "rebal/divergence.hpp"
#include "rebal/errors.hpp"
#include "rebal/knn.hpp"
#include "rebal/mixture.hpp"
#include "rebal/pipelines.hpp"
#include "rebal/prng.hpp"
#include "rebal/stats.hpp"

namespace rebal {

namespace {

std::string fmt(double v, int prec = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

DiagRow make_row(std::string check, double value, double threshold,
                 std::string note) {
    DiagRow row;
    row.check = std::move(check);
    row.value = value;
    row.threshold = threshold;
    row.pass = value <= threshold;
    row.note = std::move(note);
    return row;
}

// ---------------------------------------------------------------- formulas

std::vector<DiagRow> formulas_suite(std::uint64_t seed) {
    constexpr std::size_t kDraws = 1000000;
    const double deltas[] = {1.0, 2.0, 3.0};
    const double pi0s[] = {0.5, 0.9, 0.99};

    std::vector<DiagRow> rows;
    for (double delta : deltas) {
        for (double pi0 : pi0s) {
            MixtureSpec spec = MixtureSpec::make(pi0, {0.0}, {delta}, 1.0);
            LogisticModel gstar = gstar_gaussian(spec);
            LogisticModel fstar = fstar_gaussian(spec);
            const struct {
                const char* tag;
                const LogisticModel* classifier;
                double formula;
            } cases[] = {
                {"observed", &gstar, bayes_type2_error_observed(spec)},
                {"balanced", &fstar, bayes_type2_error_balanced(spec)},
            };
            for (const auto& c : cases) {
                SplitMix64 rng(seed_hash({seed, hash_str(c.tag),
                                          hash_str(fmt(delta)),
                                          hash_str(fmt(pi0))}));
                // Class-1 conditional draws: the type-II error is a
                // property of X | Y = 1 alone.
                std::size_t miss = 0;
                double x[1];
                for (std::size_t i = 0; i < kDraws; ++i) {
                    x[0] = delta + rng.next_normal();
                    if (c.classifier->predict({x, 1}) < 0.5) ++miss;
                }
                double p_hat =
                    static_cast<double>(miss) / static_cast<double>(kDraws);
                double se = std::sqrt(p_hat * (1.0 - p_hat) /
                                      static_cast<double>(kDraws));
                double z = std::abs(p_hat - c.formula) / se;
                rows.push_back(make_row(
                    std::string("type2_") + c.tag + "_delta" + fmt(delta) +
                        "_pi0_" + fmt(pi0),
                    z, 3.0,
                    "|z| of 1e6-draw MC " + fmt(p_hat) + " vs closed form " +
                        fmt(c.formula, 10)));
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------- coupling

DiscreteDist random_dist(SplitMix64& rng, std::size_t support) {
    std::vector<double> masses(support);
    double total = 0.0;
    for (double& m : masses) {
        m = -std::log(rng.next_uniform());
        total += m;
    }
    for (double& m : masses) m /= total;
    // Renormalize exactly enough for the 1e-12 validation gate.
    double sum = 0.0;
    for (double m : masses) sum += m;
    for (double& m : masses) m /= sum;
    return DiscreteDist::from_masses(masses);
}

std::vector<DiagRow> coupling_suite(std::uint64_t seed) {
    constexpr std::size_t kPairs = 20;
    constexpr std::size_t kDraws = 100000;

    std::vector<DiagRow> rows;
    for (std::size_t t = 0; t < kPairs; ++t) {
        SplitMix64 rng(seed_hash({seed, t, hash_str("coupling-pair")}));
        std::size_t support = 2 + rng.next_below(7);
        DiscreteDist p1 = random_dist(rng, support);
        DiscreteDist p2 = random_dist(rng, support);
        double tv = tv_discrete(p1, p2);
        CouplingTrace trace = maximal_coupling_sample(
            p1, p2, kDraws, seed_hash({seed, t, hash_str("coupling-draw")}));

        double frac = trace.mismatch_fraction();
        double sigma =
            std::sqrt(tv * (1.0 - tv) / static_cast<double>(kDraws));
        rows.push_back(make_row(
            "mismatch_vs_tv_pair" + std::to_string(t), std::abs(frac - tv),
            4.0 * sigma,
            "|mismatch " + fmt(frac) + " - tv " + fmt(tv) + "|, 4 binomial sd"));

        // Goodness of fit of the u2 stream against p2.
        std::map<std::vector<double>, std::size_t> counts;
        for (const auto& pair : trace.pairs) ++counts[pair.u2];
        double stat = 0.0;
        for (const auto& atom : p2.atoms) {
            double expected = atom.mass * static_cast<double>(kDraws);
            auto it = counts.find(atom.point);
            double observed =
                it == counts.end() ? 0.0 : static_cast<double>(it->second);
            double diff = observed - expected;
            stat += diff * diff / expected;
        }
        double p = chi2_sf(stat, support - 1);
        double neglog = p > 0.0 ? -std::log10(p)
                                : std::numeric_limits<double>::infinity();
        rows.push_back(make_row(
            "u2_marginal_gof_pair" + std::to_string(t), neglog, 3.0,
            "-log10 p of chi-square fit (p = " + fmt(p) +
                "); passes while p >= 1e-3"));
    }
    return rows;
}

// ---------------------------------------------------------------- geometry

std::vector<std::vector<double>> random_cube_points(SplitMix64& rng,
                                                    std::size_t n,
                                                    std::size_t d,
                                                    bool jitter) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    for (auto& p : pts) {
        for (double& c : p) {
            c = rng.next_uniform();
            if (jitter) c += 1e-9 * (rng.next_uniform() - 0.5);
        }
    }
    return pts;
}

std::vector<std::vector<double>> random_ball_points(SplitMix64& rng,
                                                    std::size_t n,
                                                    std::size_t d) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    for (auto& p : pts) {
        double norm_sq = 0.0;
        for (double& c : p) {
            c = rng.next_normal();
            norm_sq += c * c;
        }
        double norm = std::sqrt(norm_sq);
        double radius = std::pow(rng.next_uniform(),
                                 1.0 / static_cast<double>(d));
        for (double& c : p) c = c / norm * radius;
    }
    return pts;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

std::vector<DiagRow> geometry_suite(std::uint64_t seed) {
    std::vector<DiagRow> rows;

    // 1-NN in-degree never exceeds the sphere-packing bound per dimension.
    const std::size_t kConfigs = 1000;
    const std::size_t kPoints = 200;
    const std::size_t taus[] = {0, 2, 6, 12};  // index by d
    for (std::size_t d = 1; d <= 3; ++d) {
        std::size_t worst = 0;
        for (std::size_t c = 0; c < kConfigs; ++c) {
            SplitMix64 rng(seed_hash({seed, d, c, hash_str("indeg")}));
            KnnIndex index(random_cube_points(rng, kPoints, d, true));
            worst = std::max(worst, max_indegree(index, 1));
        }
        rows.push_back(make_row(
            "max_1nn_indegree_d" + std::to_string(d),
            static_cast<double>(worst), static_cast<double>(taus[d]),
            "worst over 1000 jittered configs of 200 points"));
    }

    // Soft k * 5^d ceiling (never claimed tight) and monotonicity in k.
    {
        SplitMix64 rng(seed_hash({seed, hash_str("soft-bound")}));
        KnnIndex index(random_cube_points(rng, kPoints, 2, true));
        for (std::size_t k : {1, 3, 5}) {
            rows.push_back(make_row(
                "indegree_soft_bound_d2_k" + std::to_string(k),
                static_cast<double>(max_indegree(index, k)),
                static_cast<double>(k * 25), "bound k * 5^d, d = 2"));
        }
        std::size_t inversions = 0;
        std::size_t prev = 0;
        for (std::size_t k = 1; k <= 8; ++k) {
            std::size_t cur = max_indegree(index, k);
            if (cur < prev) ++inversions;
            prev = cur;
        }
        rows.push_back(make_row("indegree_monotone_in_k",
                                static_cast<double>(inversions), 0.0,
                                "inversions of max_indegree over k = 1..8"));
    }

    // Mean nearest-neighbor distance should scale like n^(-1/d).
    for (std::size_t d : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
        std::vector<double> log_n, log_rk;
        for (std::size_t p = 7; p <= 13; ++p) {
            std::size_t n = std::size_t{1} << p;
            double mean = 0.0;
            const int kReps = 3;
            for (int rep = 0; rep < kReps; ++rep) {
                SplitMix64 rng(seed_hash({seed, d, p,
                                          static_cast<std::uint64_t>(rep),
                                          hash_str("rk")}));
                auto pts = d == 4 ? random_ball_points(rng, n, d)
                                  : random_cube_points(rng, n, d, false);
                mean += rk_stats_scan(pts, 1).mean_rk;
            }
            mean /= kReps;
            log_n.push_back(std::log(static_cast<double>(n)));
            log_rk.push_back(std::log(mean));
        }
        double slope = fit_slope(log_n, log_rk);
        double target = -1.0 / static_cast<double>(d);
        rows.push_back(make_row(
            "rk_slope_d" + std::to_string(d), std::abs(slope - target), 0.2,
            "fitted slope " + fmt(slope) + " vs -1/d = " + fmt(target) +
                ", n = 2^7..2^13"));
    }
    return rows;
}

// ------------------------------------------------------------ plugin bound

std::vector<DiagRow> plugin_bound_suite(std::uint64_t seed) {
    MixtureSpec spec = MixtureSpec::make(0.9, {0.0}, {2.0}, 1.0);
    LogisticModel fstar = fstar_gaussian(spec);
    LogisticModel gstar = gstar_gaussian(spec);

    std::vector<DiagRow> rows;

    // Identity: the exact conditional and priors reproduce the balanced
    // posterior pointwise.
    {
        PluginModel exact{gstar, spec.pi0, spec.pi1};
        double worst = 0.0;
        const std::size_t kGrid = 1000;
        for (std::size_t i = 0; i < kGrid; ++i) {
            double x = -3.0 + 8.0 * static_cast<double>(i) /
                                  static_cast<double>(kGrid - 1);
            worst = std::max(worst, std::abs(exact.predict({&x, 1}) -
                                             fstar.predict({&x, 1})));
        }
        rows.push_back(make_row("plugin_identity_max_abs", worst, 1e-12,
                                "grid of 1000 points on [-3, 5]"));
    }

    // Estimation-error transfer bound under logit perturbations of g*.
    constexpr std::size_t kDraws = 1000000;
    std::vector<double> xq(kDraws), xp(kDraws);
    {
        SplitMix64 rng(seed_hash({seed, hash_str("bound-draw-q")}));
        std::vector<double> buf(1);
        for (double& x : xq) {
            detail::draw_labeled(spec, 0.5, rng, buf);
            x = buf[0];
        }
        SplitMix64 rng_p(seed_hash({seed, hash_str("bound-draw-p")}));
        for (double& x : xp) {
            detail::draw_labeled(spec, spec.pi1, rng_p, buf);
            x = buf[0];
        }
    }
    double bound_const = std::sqrt(spec.pi0 / 2.0) / spec.pi1;

    SplitMix64 rng(seed_hash({seed, hash_str("bound-delta")}));
    const std::size_t kPerturbations = 100;
    for (std::size_t t = 0; t < kPerturbations; ++t) {
        double magnitude = std::exp(std::log(0.01) +
                                    rng.next_uniform() * std::log(100.0));
        double delta = rng.next_uniform() < 0.5 ? -magnitude : magnitude;
        LogisticModel ghat = gstar;
        ghat.b += delta;
        PluginModel fplug{ghat, spec.pi0, spec.pi1};

        KahanSum lhs_sq, lhs_quad, rhs_sq, rhs_quad;
        for (std::size_t i = 0; i < kDraws; ++i) {
            double dl = fplug.predict({&xq[i], 1}) - fstar.predict({&xq[i], 1});
            lhs_sq.add(dl * dl);
            lhs_quad.add(dl * dl * dl * dl);
            double dg = ghat.predict({&xp[i], 1}) - gstar.predict({&xp[i], 1});
            rhs_sq.add(dg * dg);
            rhs_quad.add(dg * dg * dg * dg);
        }
        double n = static_cast<double>(kDraws);
        double msq_l = lhs_sq.value() / n;
        double msq_g = rhs_sq.value() / n;
        double var_l = (lhs_quad.value() / n - msq_l * msq_l) / n;
        double var_g = (rhs_quad.value() / n - msq_g * msq_g) / n;
        double lhs = std::sqrt(msq_l);
        double gnorm = std::sqrt(msq_g);
        double rhs = bound_const * gnorm;
        // Delta method: se(sqrt(m)) = se(m) / (2 sqrt(m)).
        double se_lhs = std::sqrt(std::max(var_l, 0.0)) / (2.0 * lhs);
        double se_rhs = bound_const * std::sqrt(std::max(var_g, 0.0)) /
                        (2.0 * gnorm);
        double slack = 3.0 * std::sqrt(se_lhs * se_lhs + se_rhs * se_rhs);
        rows.push_back(make_row(
            "plugin_bound_delta_" + fmt(delta), lhs - rhs, slack,
            "lhs " + fmt(lhs) + " vs bound " + fmt(rhs) + " (3 combined se)"));
    }
    return rows;
}

}  // namespace

DiagSuite parse_suite(std::string_view name) {
    if (name == "formulas") return DiagSuite::Formulas;
    if (name == "coupling") return DiagSuite::Coupling;
    if (name == "geometry") return DiagSuite::Geometry;
    if (name == "plugin-bound") return DiagSuite::PluginBound;
    throw config_error("unknown diagnostic suite: " + std::string(name));
}

std::string suite_name(DiagSuite suite) {
    switch (suite) {
        case DiagSuite::Formulas:
            return "formulas";
        case DiagSuite::Coupling:
            return "coupling";
        case DiagSuite::Geometry:
            return "geometry";
        case DiagSuite::PluginBound:
            return "plugin-bound";
    }
    throw config_error("corrupt DiagSuite");
}

std::vector<DiagRow> run_diagnostics(DiagSuite suite, std::uint64_t seed) {
    switch (suite) {
        case DiagSuite::Formulas:
            return formulas_suite(seed);
        case DiagSuite::Coupling:
            return coupling_suite(seed);
        case DiagSuite::Geometry:
            return geometry_suite(seed);
        case DiagSuite::PluginBound:
            return plugin_bound_suite(seed);
    }
    throw config_error("corrupt DiagSuite");
}

bool all_pass(const std::vector<DiagRow>& rows) {
    return std::all_of(rows.begin(), rows.end(),
                       [](const DiagRow& r) { return r.pass; });
}

void write_diag_csv(std::ostream& out, DiagSuite suite,
                    const std::vector<DiagRow>& rows) {
    out << "suite,check,value,threshold,pass,note\n";
    std::string name = suite_name(suite);
    for (const auto& r : rows) {
        std::string note = r.note;
        std::replace(note.begin(), note.end(), ',', ';');
        out << name << ',' << r.check << ',' << fmt(r.value, 12) << ','
            << fmt(r.threshold, 12) << ',' << (r.pass ? "1" : "0") << ','
            << note << '\n';
    }
}

}  // namespace rebal
