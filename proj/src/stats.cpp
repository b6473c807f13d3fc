#include "rebal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rebal/errors.hpp"

namespace rebal {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488);
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) * 0.39894228040143267794;
}

double normal_pdf(double x, double mu, double sigma) {
    double z = (x - mu) / sigma;
    return normal_pdf(z) / sigma;
}

namespace {

// Lower regularized incomplete gamma by power series; valid for x < a+1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by modified Lentz continued fraction;
// valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw domain_error("gamma_q requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double stat, std::size_t dof) {
    if (dof == 0) throw domain_error("chi2_sf requires dof >= 1");
    if (stat <= 0.0) return 1.0;
    return gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat);
}

double binom_upper_tail(std::size_t n, std::size_t k, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw domain_error("binom_upper_tail requires p in [0,1]");
    }
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    double lp = std::log(p);
    double lq = std::log1p(-p);
    KahanSum tail;
    for (std::size_t i = k; i <= n; ++i) {
        double lc = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                    std::lgamma(n - i + 1.0);
        tail.add(std::exp(lc + i * lp + (n - i) * lq));
    }
    return std::min(1.0, tail.value());
}

double median(std::vector<double> v) {
    if (v.empty()) throw domain_error("median of empty sample");
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return 0.5 * (v[(n - 1) / 2] + v[n / 2]);
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw domain_error("quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw domain_error("quantile level outside [0,1]");
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

namespace {

double simpson_rule(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = simpson_rule(fa, flm, fm, m - a);
    double right = simpson_rule(fm, frm, fb, b - m);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double simpson_adaptive(const std::function<double(double)>& f, double lo,
                        double hi, double abs_tol) {
    if (!(hi > lo)) throw domain_error("simpson_adaptive requires hi > lo");
    double fa = f(lo);
    double fb = f(hi);
    double fm = f(0.5 * (lo + hi));
    double whole = simpson_rule(fa, fm, fb, hi - lo);
    return simpson_rec(f, lo, hi, fa, fm, fb, whole, abs_tol, 48);
}

}  // namespace rebal
