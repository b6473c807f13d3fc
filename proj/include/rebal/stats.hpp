#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace rebal {

// Compensated (Kahan) accumulator.  Keeps absolute summation error near one
// ulp of the running sum; the ERM line search depends on this resolution.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    // Neumaier's variant: compensation survives even when the running sum
    // swings through magnitudes larger than the terms being recovered.
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + carry; }
};

// Standard normal CDF via erfc; absolute error a few ulp, well inside the
// 1e-12 the formula tests require.
double normal_cdf(double x);

// Standard normal density, and the general univariate normal density.
double normal_pdf(double x);
double normal_pdf(double x, double mu, double sigma);

// Upper regularized incomplete gamma Q(a, x), a > 0, x >= 0.
// Series for x < a+1, Lentz continued fraction otherwise.
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with dof degrees of
// freedom: P(X >= stat) = Q(dof/2, stat/2).
double chi2_sf(double stat, std::size_t dof);

// Exact upper tail P(Bin(n, p) >= k).
double binom_upper_tail(std::size_t n, std::size_t k, double p);

// Median (midpoint of the two central order statistics for even sizes).
double median(std::vector<double> v);

// Quantile with linear interpolation between order statistics
// (the "type 7" convention), q in [0, 1].
double quantile(std::vector<double> v, double q);

// Adaptive Simpson quadrature with absolute tolerance abs_tol.
double simpson_adaptive(const std::function<double(double)>& f, double lo,
                        double hi, double abs_tol);

}  // namespace rebal
