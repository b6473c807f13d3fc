#pragma once

// End-to-end estimators targeting the balanced (or a general) label prior:
// synthetic rebalancing, majority undersampling, prior-reweighted plug-in,
// and the plain weighted-ERM baseline.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "rebal/erm.hpp"
#include "rebal/generators.hpp"
#include "rebal/logistic.hpp"
#include "rebal/mixture.hpp"

namespace rebal {

// Number of synthetic minority draws.
struct JRule {
    enum class Kind { Estimated, Fixed };
    Kind kind = Kind::Estimated;
    std::size_t fixed_j = 0;

    static JRule estimated() { return JRule{}; }
    static JRule fixed(std::size_t j) { return JRule{Kind::Fixed, j}; }
};

// Number of majority samples kept by undersampling.
struct KRule {
    enum class Kind { MatchMinority, Fixed };
    Kind kind = Kind::MatchMinority;
    std::size_t fixed_k = 0;

    static KRule match_minority() { return KRule{}; }
    static KRule fixed(std::size_t k) { return KRule{Kind::Fixed, k}; }
};

enum class PriorSource { Known, Estimated };

struct RebalanceCfg {
    GeneratorSpec generator;
    JRule j;
};
struct UndersampleCfg {
    KRule k_majority;
};
struct PlugInCfg {
    PriorSource prior_source = PriorSource::Estimated;
};
struct ErmRawCfg {};

struct PipelineConfig {
    std::variant<RebalanceCfg, UndersampleCfg, PlugInCfg, ErmRawCfg> method =
        ErmRawCfg{};
    TargetSpec target = TargetSpec::balanced();
    OptimizerSettings optimizer;

    // "rebalance" | "undersample" | "plugin" | "erm-raw".
    std::string method_name() const;
    // Generator config string for rebalance, "-" otherwise.
    std::string generator_name() const;
    // Unique label for result rows: method name, plus ":<generator>" for
    // rebalance (e.g. "rebalance:smote:k=5").
    std::string id() const;
};

// Posterior reweighting of an estimate of the observed-prior conditional
// g(x) = P(Y=1|X=x) into the balanced-prior conditional:
//   predict(x) = pi0 / (pi0 + pi1 (1/g(x) - 1)).
// g_hat's clipping keeps g strictly inside (0,1), so the division is always
// well defined and the output lies strictly inside (0,1) as well; no second
// clipping is applied, which keeps the exact-(g*, pi) identity exact.
struct PluginModel {
    LogisticModel g_hat;
    double pi0 = 0.5;
    double pi1 = 0.5;

    double predict(std::span<const double> x) const;
};

// Provenance of one pipeline run, for result rows and model files.
struct RunManifest {
    std::uint64_t seed = 0;
    std::size_t j = 0;
    std::string method;
    std::string generator = "-";
    ErmStatus optimizer_status;
};

// Algorithm: draw J synthetic minority points from the configured generator,
// append them with label 1, and minimize the uniformly weighted (1/(N+J))
// cross-entropy.  J comes from the rule: Fixed(J) as given, Estimated as
// max(0, round(n0 pi1*/pi0* - n1)), which balances the class ratio to the
// target (n0 - n1 for the balanced target).
LogisticModel rebalance_train(const Dataset& data, const PipelineConfig& cfg,
                              std::uint64_t seed, RunManifest* man = nullptr);

// Algorithm: keep a uniform without-replacement subsample of K majority
// points (seeded Fisher-Yates prefix), all minority points, uniform weights
// 1/(K + n1).  MatchMinority sets K = n1; K > n0 is a configuration error.
LogisticModel undersample_train(const Dataset& data, const PipelineConfig& cfg,
                                std::uint64_t seed, RunManifest* man = nullptr);

// Trains g_hat by plain ERM on the observed data and wraps it with priors
// taken from spec (Known; spec required) or empirical class frequencies
// (Estimated; throws degenerate_prior_error when a class is absent).
PluginModel plugin_train(const Dataset& data, const PipelineConfig& cfg,
                         const MixtureSpec* spec, std::uint64_t seed,
                         RunManifest* man = nullptr);

// Plain weighted ERM on the observed data (weights 1/N).  The baseline the
// rebalancing comparisons are made against.
LogisticModel erm_raw_train(const Dataset& data, const PipelineConfig& cfg,
                            RunManifest* man = nullptr);

// Rebalancing toward an arbitrary target prior: identical to rebalance_train
// except the Estimated rule reads the given target instead of cfg.target.
LogisticModel train_general_target(const Dataset& data, const TargetSpec& target,
                                   const PipelineConfig& cfg, std::uint64_t seed,
                                   RunManifest* man = nullptr);

// The synthetic count the Estimated rule produces for this data and target.
std::size_t estimated_j(const Dataset& data, const TargetSpec& target);

}  // namespace rebal
