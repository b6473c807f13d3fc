#include "rebal/erm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rebal/errors.hpp"
#include "rebal/stats.hpp"

namespace rebal {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

// Flattened view of the training set with weights normalized to sum to one.
struct Problem {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> x;  // n x d, row-major
    std::vector<int> y;
    std::vector<double> w;  // normalized weights
    double lambda = 0.0;
    double clip_eps;
    double z_hi;  // logit(1 - clip_eps); predictions clip outside [-z_hi, z_hi]
    double loss_in;   // loss at the clip floor for the true label
    double loss_out;  // loss at the clip floor for the opposite label

    Problem(const std::vector<WeightedSample>& data,
            const OptimizerSettings& opts) {
        n = data.size();
        if (n == 0) throw config_error("erm_train requires a nonempty sample");
        d = data[0].x.size();
        lambda = opts.ridge_lambda;
        clip_eps = opts.clip_eps;
        z_hi = std::log((1.0 - clip_eps) / clip_eps);
        loss_in = -std::log1p(-clip_eps);
        loss_out = -std::log(clip_eps);

        x.resize(n * d);
        y.resize(n);
        w.resize(n);
        KahanSum total;
        bool saw[2] = {false, false};
        for (std::size_t i = 0; i < n; ++i) {
            const WeightedSample& s = data[i];
            if (s.x.size() != d) {
                throw config_error("erm_train samples disagree on dimension");
            }
            if (s.weight < 0.0) {
                throw config_error("erm_train weights must be nonnegative");
            }
            std::copy(s.x.begin(), s.x.end(), x.begin() + i * d);
            y[i] = s.y;
            w[i] = s.weight;
            total.add(s.weight);
            if (s.weight > 0.0) saw[s.y ? 1 : 0] = true;
        }
        if (!(total.value() > 0.0)) {
            throw config_error("erm_train weights must not all be zero");
        }
        if (!saw[0] || !saw[1]) {
            throw degenerate_separation_error(
                "erm_train requires positive weight on both labels; the "
                "unregularized minimum is otherwise at infinity");
        }
        for (double& wi : w) wi /= total.value();
    }

    // Objective value; params = [w(0..d-1), b].
    double value(const std::vector<double>& p) const {
        KahanSum acc;
        const double b = p[d];
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == 0.0) continue;
            double z = b;
            const double* xi = x.data() + i * d;
            for (std::size_t j = 0; j < d; ++j) z += p[j] * xi[j];
            double li;
            if (z >= z_hi) {
                li = y[i] ? loss_in : loss_out;
            } else if (z <= -z_hi) {
                li = y[i] ? loss_out : loss_in;
            } else {
                li = softplus(z) - (y[i] ? z : 0.0);
            }
            acc.add(w[i] * li);
        }
        double v = acc.value();
        if (lambda != 0.0) {
            double r = 0.0;
            for (std::size_t j = 0; j < d; ++j) r += p[j] * p[j];
            v += 0.5 * lambda * r;
        }
        return v;
    }

    // Value and gradient together.  Samples in the clip region contribute a
    // constant loss and a zero gradient.
    double value_and_grad(const std::vector<double>& p,
                          std::vector<double>& grad) const {
        KahanSum acc;
        std::vector<KahanSum> g(d + 1);
        const double b = p[d];
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == 0.0) continue;
            double z = b;
            const double* xi = x.data() + i * d;
            for (std::size_t j = 0; j < d; ++j) z += p[j] * xi[j];
            if (z >= z_hi) {
                acc.add(w[i] * (y[i] ? loss_in : loss_out));
                continue;
            }
            if (z <= -z_hi) {
                acc.add(w[i] * (y[i] ? loss_out : loss_in));
                continue;
            }
            acc.add(w[i] * (softplus(z) - (y[i] ? z : 0.0)));
            double r = w[i] * (1.0 / (1.0 + std::exp(-z)) - y[i]);
            for (std::size_t j = 0; j < d; ++j) g[j].add(r * xi[j]);
            g[d].add(r);
        }
        double v = acc.value();
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] = g[j].value();
            if (lambda != 0.0) {
                grad[j] += lambda * p[j];
                v += 0.5 * lambda * p[j] * p[j];
            }
        }
        grad[d] = g[d].value();
        return v;
    }

};

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

LogisticModel erm_train(const std::vector<WeightedSample>& data,
                        const LogisticModel& init,
                        const OptimizerSettings& opts, ErmStatus* status) {
    Problem prob(data, opts);
    if (init.w.size() != prob.d) {
        throw config_error("erm_train init model has wrong dimension");
    }

    std::vector<double> p(prob.d + 1);
    std::copy(init.w.begin(), init.w.end(), p.begin());
    p[prob.d] = init.b;

    std::vector<double> grad(prob.d + 1);
    std::vector<double> cand(prob.d + 1);
    double fx = prob.value_and_grad(p, grad);
    double step = 1.0;

    auto make_model = [&](const std::vector<double>& q) {
        LogisticModel m;
        m.w.assign(q.begin(), q.begin() + prob.d);
        m.b = q[prob.d];
        m.clip_eps = opts.clip_eps;
        return m;
    };

    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        double gnorm = norm2(grad);
        if (gnorm <= opts.grad_tol) {
            if (status) {
                status->iters = iter;
                status->grad_norm = gnorm;
            }
            return make_model(p);
        }
        // Backtracking line search, warm-started from twice the last
        // accepted step.
        double g2 = gnorm * gnorm;
        double t = std::min(step * 2.0, 1e8);
        bool accepted = false;
        while (t >= 1e-20) {
            for (std::size_t j = 0; j <= prob.d; ++j) {
                cand[j] = p[j] - t * grad[j];
            }
            double fc = prob.value(cand);
            if (std::isfinite(fc) && fc <= fx - opts.armijo_c * t * g2) {
                accepted = true;
                break;
            }
            t *= opts.armijo_beta;
        }
        if (!accepted) {
            throw convergence_error(
                "erm_train line search stalled before reaching grad_tol",
                make_model(p), iter, gnorm);
        }
        p.swap(cand);
        step = t;
        fx = prob.value_and_grad(p, grad);
    }
    double gnorm = norm2(grad);
    throw convergence_error("erm_train exceeded max_iters", make_model(p),
                            opts.max_iters, gnorm);
}

LogisticModel erm_train(const std::vector<WeightedSample>& data,
                        const OptimizerSettings& opts, ErmStatus* status) {
    KahanSum cls[2];
    for (const WeightedSample& s : data) cls[s.y ? 1 : 0].add(s.weight);
    LogisticModel init;
    init.w.assign(data.empty() ? 0 : data[0].x.size(), 0.0);
    // log of the weighted class ratio; on single-class data this is not
    // finite, but the main overload rejects that input before using it.
    init.b = std::log(cls[1].value() / cls[0].value());
    init.clip_eps = opts.clip_eps;
    return erm_train(data, init, opts, status);
}

}  // namespace rebal
