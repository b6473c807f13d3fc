// Training pipelines: equivalences between configurations that must
// coincide, the synthetic-count rule, the plug-in reweighting identity,
// manifests, and the error contract.

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "rebal/errors.hpp"
#include "rebal/mixture.hpp"
#include "rebal/pipelines.hpp"
#include "rebal/prng.hpp"

using namespace rebal;

namespace {

MixtureSpec spec_2d(double pi0 = 0.9) {
    return MixtureSpec::make(pi0, {0.0, 0.0}, {1.0, 1.0}, 1.0);
}

PipelineConfig rebalance_cfg(const char* generator, JRule j = JRule::estimated()) {
    PipelineConfig cfg;
    cfg.method = RebalanceCfg{GeneratorSpec::parse(generator), j};
    return cfg;
}

Dataset counted_dataset(std::size_t n0, std::size_t n1, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Dataset d;
    d.dim = 2;
    for (std::size_t i = 0; i < n0; ++i) {
        d.samples.push_back(
            {{rng.next_normal() - 0.5, rng.next_normal()}, 0});
    }
    for (std::size_t i = 0; i < n1; ++i) {
        d.samples.push_back(
            {{rng.next_normal() + 0.8, rng.next_normal() + 0.6}, 1});
    }
    return d;
}

}  // namespace

TEST_CASE("config labels") {
    PipelineConfig r = rebalance_cfg("smote:k=5");
    CHECK(r.method_name() == "rebalance");
    CHECK(r.generator_name() == "smote:k=5");
    CHECK(r.id() == "rebalance:smote:k=5");

    PipelineConfig u;
    u.method = UndersampleCfg{KRule::match_minority()};
    CHECK(u.method_name() == "undersample");
    CHECK(u.generator_name() == "-");
    CHECK(u.id() == "undersample");

    PipelineConfig p;
    p.method = PlugInCfg{PriorSource::Known};
    CHECK(p.id() == "plugin");

    PipelineConfig e;
    CHECK(e.id() == "erm-raw");
}

TEST_CASE("estimated synthetic counts") {
    Dataset d = counted_dataset(900, 100, 1);
    CHECK(estimated_j(d, TargetSpec::balanced()) == 800);
    // Target pi1* = 2/3: J = 900 * 2 - 100.
    CHECK(estimated_j(d, TargetSpec::make(1.0 / 3.0)) == 1700);
    // Target pi1* = 1/4: J = round(900 / 3) - 100.
    CHECK(estimated_j(d, TargetSpec::make(0.75)) == 200);

    Dataset balanced = counted_dataset(200, 200, 2);
    CHECK(estimated_j(balanced, TargetSpec::balanced()) == 0);

    Dataset minority_heavy = counted_dataset(50, 200, 3);
    CHECK(estimated_j(minority_heavy, TargetSpec::balanced()) == 0);
}

TEST_CASE("rebalance with a fixed zero count equals the raw baseline") {
    Dataset d = counted_dataset(300, 60, 7);
    PipelineConfig reb = rebalance_cfg("bootstrap", JRule::fixed(0));
    RunManifest man_r;
    LogisticModel a = rebalance_train(d, reb, 99, &man_r);

    PipelineConfig raw;
    RunManifest man_e;
    LogisticModel b = erm_raw_train(d, raw, &man_e);

    CHECK(a.w[0] == doctest::Approx(b.w[0]).epsilon(1e-12));
    CHECK(a.w[1] == doctest::Approx(b.w[1]).epsilon(1e-12));
    CHECK(a.b == doctest::Approx(b.b).epsilon(1e-12));
    CHECK(man_r.j == 0);
    CHECK(man_e.method == "erm-raw");
    CHECK(man_e.generator == "-");
    CHECK(man_e.seed == 0);
}

TEST_CASE("estimated rule balances the empirical counts exactly") {
    Dataset d = counted_dataset(900, 100, 11);
    PipelineConfig reb = rebalance_cfg("bootstrap");
    RunManifest man;
    rebalance_train(d, reb, 5, &man);
    CHECK(man.j == 800);
    CHECK(man.method == "rebalance");
    CHECK(man.generator == "bootstrap");
    CHECK(man.seed == 5);
    CHECK(man.optimizer_status.grad_norm <= 1e-8);
    CHECK_FALSE(man.optimizer_status.ridge_fallback);
}

TEST_CASE("general-target rebalancing reads the target's class ratio") {
    Dataset d = counted_dataset(900, 100, 13);
    PipelineConfig reb = rebalance_cfg("bootstrap");
    RunManifest man;
    train_general_target(d, TargetSpec::make(0.25), reb, 5, &man);
    // J = round(900 * 3) - 100.
    CHECK(man.j == 2600);
}

TEST_CASE("rebalance training replays under the same seed") {
    Dataset d = counted_dataset(400, 80, 17);
    PipelineConfig reb = rebalance_cfg("smote:k=5");
    LogisticModel a = rebalance_train(d, reb, 42);
    LogisticModel b = rebalance_train(d, reb, 42);
    CHECK(a.w == b.w);
    CHECK(a.b == b.b);
    LogisticModel c = rebalance_train(d, reb, 43);
    bool differs = (a.w != c.w) || (a.b != c.b);
    CHECK(differs);
}

TEST_CASE("undersampling the full majority equals the raw baseline") {
    Dataset d = counted_dataset(250, 250, 19);
    PipelineConfig under;
    under.method = UndersampleCfg{KRule::fixed(250)};
    LogisticModel a = undersample_train(d, under, 3);

    PipelineConfig raw;
    LogisticModel b = erm_raw_train(d, raw);
    CHECK(a.w[0] == doctest::Approx(b.w[0]).epsilon(1e-9));
    CHECK(a.w[1] == doctest::Approx(b.w[1]).epsilon(1e-9));
    CHECK(a.b == doctest::Approx(b.b).epsilon(1e-9));

    // Matching the minority on balanced data keeps everything as well.
    PipelineConfig match;
    match.method = UndersampleCfg{KRule::match_minority()};
    LogisticModel c = undersample_train(d, match, 3);
    CHECK(c.w[0] == doctest::Approx(b.w[0]).epsilon(1e-9));
    CHECK(c.b == doctest::Approx(b.b).epsilon(1e-9));
}

TEST_CASE("undersampling shifts the intercept toward balance") {
    // With a 9:1 sample, keeping n1 majority points moves the fitted
    // intercept up by roughly log(9).
    MixtureSpec spec = spec_2d(0.9);
    Dataset d = sample_observed(spec, 4000, 23);
    PipelineConfig match;
    match.method = UndersampleCfg{KRule::match_minority()};
    LogisticModel balanced_fit = undersample_train(d, match, 7);

    PipelineConfig raw;
    LogisticModel raw_fit = erm_raw_train(d, raw);
    double shift = balanced_fit.b - raw_fit.b;
    CHECK(shift > 1.0);
    CHECK(shift < 3.5);
}

TEST_CASE("undersample count above the majority size is rejected") {
    Dataset d = counted_dataset(100, 50, 29);
    PipelineConfig under;
    under.method = UndersampleCfg{KRule::fixed(101)};
    CHECK_THROWS_AS(undersample_train(d, under, 1), config_error);
    under.method = UndersampleCfg{KRule::fixed(100)};
    CHECK_NOTHROW(undersample_train(d, under, 1));
}

TEST_CASE("plug-in with exact inputs reproduces the balanced posterior") {
    MixtureSpec spec = spec_2d(0.9);
    PluginModel plug;
    plug.g_hat = gstar_gaussian(spec);
    plug.pi0 = spec.pi0;
    plug.pi1 = spec.pi1;
    LogisticModel f = fstar_gaussian(spec);

    SplitMix64 rng(31);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x{2.0 * rng.next_normal(), 2.0 * rng.next_normal()};
        // Compare away from the clip region, where f* itself is exact.
        double z = f.logit(x);
        if (std::abs(z) > 13.0) continue;
        CHECK(std::abs(plug.predict(x) - f.predict(x)) < 1e-12);
    }
}

TEST_CASE("plug-in with balanced priors is the identity reweighting") {
    MixtureSpec spec = spec_2d(0.8);
    PluginModel plug;
    plug.g_hat = gstar_gaussian(spec);
    plug.pi0 = 0.5;
    plug.pi1 = 0.5;
    SplitMix64 rng(37);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x{rng.next_normal(), rng.next_normal()};
        CHECK(plug.predict(x) ==
              doctest::Approx(plug.g_hat.predict(x)).epsilon(1e-14));
    }
}

TEST_CASE("plugin_train resolves priors before fitting") {
    MixtureSpec spec = spec_2d(0.9);
    Dataset d = sample_observed(spec, 2000, 41);

    PipelineConfig known;
    known.method = PlugInCfg{PriorSource::Known};
    RunManifest man;
    PluginModel mk = plugin_train(d, known, &spec, 1, &man);
    CHECK(mk.pi0 == spec.pi0);
    CHECK(mk.pi1 == spec.pi1);
    CHECK(man.method == "plugin");

    PipelineConfig est;
    est.method = PlugInCfg{PriorSource::Estimated};
    PluginModel me = plugin_train(d, est, nullptr, 1);
    double n1 = static_cast<double>(d.count(1));
    CHECK(me.pi1 ==
          doctest::Approx(n1 / static_cast<double>(d.size())).epsilon(1e-12));

    CHECK_THROWS_AS(plugin_train(d, known, nullptr, 1), config_error);

    Dataset single;
    single.dim = 2;
    for (int i = 0; i < 10; ++i) {
        single.samples.push_back({{0.1 * i, 0.0}, 0});
    }
    CHECK_THROWS_AS(plugin_train(single, est, nullptr, 1),
                    degenerate_prior_error);
}

TEST_CASE("wrong method variant is rejected by each entry point") {
    Dataset d = counted_dataset(100, 40, 43);
    PipelineConfig raw;  // ErmRawCfg
    CHECK_THROWS_AS(rebalance_train(d, raw, 1), config_error);
    CHECK_THROWS_AS(undersample_train(d, raw, 1), config_error);
    CHECK_THROWS_AS(plugin_train(d, raw, nullptr, 1), config_error);
}

TEST_CASE("insufficient minority support propagates from the generator") {
    Dataset d = counted_dataset(100, 3, 47);
    PipelineConfig reb = rebalance_cfg("smote:k=5");
    CHECK_THROWS_AS(rebalance_train(d, reb, 1), insufficient_data_error);
    // Bootstrap has no neighbor requirement and still works.
    PipelineConfig boot = rebalance_cfg("bootstrap");
    CHECK_NOTHROW(rebalance_train(d, boot, 1));
}

TEST_CASE("single-label data cannot be trained") {
    Dataset d;
    d.dim = 1;
    for (int i = 0; i < 20; ++i) {
        d.samples.push_back({{0.1 * i}, 0});
    }
    PipelineConfig raw;
    CHECK_THROWS_AS(erm_raw_train(d, raw), degenerate_separation_error);
}

TEST_CASE("unreachable tolerance surfaces as a convergence error") {
    Dataset d = counted_dataset(150, 80, 53);
    PipelineConfig raw;
    raw.optimizer.grad_tol = 0.0;
    raw.optimizer.max_iters = 50;
    CHECK_THROWS_AS(erm_raw_train(d, raw), convergence_error);
}

TEST_CASE("rebalanced fit approaches the balanced-posterior parameters") {
    // With a generous sample the bootstrap-rebalanced ERM should land near
    // the closed-form balanced posterior, not the observed one.
    MixtureSpec spec = spec_2d(0.9);
    Dataset d = sample_observed(spec, 20000, 59);
    PipelineConfig reb = rebalance_cfg("bootstrap");
    LogisticModel m = rebalance_train(d, reb, 9);
    LogisticModel f = fstar_gaussian(spec);
    LogisticModel g = gstar_gaussian(spec);
    double df = std::abs(m.b - f.b);
    double dg = std::abs(m.b - g.b);
    CHECK(df < dg);
    CHECK(std::abs(m.w[0] - f.w[0]) < 0.2);
    CHECK(std::abs(m.w[1] - f.w[1]) < 0.2);
    CHECK(df < 0.35);
}
