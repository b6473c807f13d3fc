#include "rebal/pipelines.hpp"

#include <cmath>
#include <utility>

#include "rebal/errors.hpp"
#include "rebal/prng.hpp"

namespace rebal {

std::string PipelineConfig::method_name() const {
    struct Visitor {
        std::string operator()(const RebalanceCfg&) const { return "rebalance"; }
        std::string operator()(const UndersampleCfg&) const { return "undersample"; }
        std::string operator()(const PlugInCfg&) const { return "plugin"; }
        std::string operator()(const ErmRawCfg&) const { return "erm-raw"; }
    };
    return std::visit(Visitor{}, method);
}

std::string PipelineConfig::generator_name() const {
    if (const auto* r = std::get_if<RebalanceCfg>(&method)) {
        return r->generator.to_string();
    }
    return "-";
}

std::string PipelineConfig::id() const {
    if (std::holds_alternative<RebalanceCfg>(method)) {
        return method_name() + ":" + generator_name();
    }
    return method_name();
}

double PluginModel::predict(std::span<const double> x) const {
    double g = g_hat.predict(x);  // clipped into (0,1) by the model
    return pi0 / (pi0 + pi1 * (1.0 / g - 1.0));
}

namespace {

void validate_target(const TargetSpec& target) {
    if (!(target.pi0_star > 0.0 && target.pi0_star < 1.0)) {
        throw config_error("target majority prior must lie strictly in (0,1)");
    }
}

// ERM with the documented fallback: a run that dies of separation or
// non-convergence is retried once with a tiny ridge term and flagged.
LogisticModel erm_with_fallback(const std::vector<WeightedSample>& samples,
                                const OptimizerSettings& opts,
                                ErmStatus* status) {
    try {
        return erm_train(samples, opts, status);
    } catch (const degenerate_separation_error&) {
        if (opts.ridge_lambda > 0.0) throw;  // already regularized
    } catch (const convergence_error&) {
        if (opts.ridge_lambda > 0.0) throw;
    }
    OptimizerSettings ridged = opts;
    ridged.ridge_lambda = 1e-8;
    LogisticModel model = erm_train(samples, ridged, status);
    if (status != nullptr) status->ridge_fallback = true;
    return model;
}

std::vector<std::vector<double>> minority_points(const Dataset& data) {
    std::vector<std::vector<double>> pts;
    for (const auto& s : data.samples) {
        if (s.y == 1) pts.push_back(s.x);
    }
    return pts;
}

void begin_manifest(RunManifest* man, const PipelineConfig& cfg,
                    std::uint64_t seed) {
    if (man == nullptr) return;
    man->seed = seed;
    man->j = 0;
    man->method = cfg.method_name();
    man->generator = cfg.generator_name();
    man->optimizer_status = ErmStatus{};
}

}  // namespace

std::size_t estimated_j(const Dataset& data, const TargetSpec& target) {
    validate_target(target);
    double n0 = static_cast<double>(data.count(0));
    double n1 = static_cast<double>(data.count(1));
    double j = std::round(n0 * target.pi1_star / target.pi0_star - n1);
    return j > 0.0 ? static_cast<std::size_t>(j) : 0;
}

LogisticModel train_general_target(const Dataset& data, const TargetSpec& target,
                                   const PipelineConfig& cfg, std::uint64_t seed,
                                   RunManifest* man) {
    const auto* rebal_cfg = std::get_if<RebalanceCfg>(&cfg.method);
    if (rebal_cfg == nullptr) {
        throw config_error("rebalance_train requires a Rebalance method config");
    }
    validate_target(target);
    begin_manifest(man, cfg, seed);

    std::size_t j = rebal_cfg->j.kind == JRule::Kind::Fixed
                        ? rebal_cfg->j.fixed_j
                        : estimated_j(data, target);
    if (man != nullptr) man->j = j;

    std::vector<std::vector<double>> minority = minority_points(data);
    SyntheticBatch batch = generate(rebal_cfg->generator, minority, j, seed);

    std::size_t total = data.size() + batch.points.size();
    if (total == 0) throw config_error("cannot train on an empty dataset");
    double weight = 1.0 / static_cast<double>(total);
    std::vector<WeightedSample> samples;
    samples.reserve(total);
    for (const auto& s : data.samples) {
        samples.push_back(WeightedSample{s.x, s.y, weight});
    }
    for (auto& p : batch.points) {
        samples.push_back(WeightedSample{std::move(p), 1, weight});
    }
    ErmStatus status;
    LogisticModel model = erm_with_fallback(samples, cfg.optimizer, &status);
    if (man != nullptr) man->optimizer_status = status;
    return model;
}

LogisticModel rebalance_train(const Dataset& data, const PipelineConfig& cfg,
                              std::uint64_t seed, RunManifest* man) {
    return train_general_target(data, cfg.target, cfg, seed, man);
}

LogisticModel undersample_train(const Dataset& data, const PipelineConfig& cfg,
                                std::uint64_t seed, RunManifest* man) {
    const auto* under_cfg = std::get_if<UndersampleCfg>(&cfg.method);
    if (under_cfg == nullptr) {
        throw config_error("undersample_train requires an Undersample method config");
    }
    begin_manifest(man, cfg, seed);

    std::vector<std::size_t> majority = data.indices(0);
    std::size_t n0 = majority.size();
    std::size_t n1 = data.count(1);
    std::size_t k = under_cfg->k_majority.kind == KRule::Kind::MatchMinority
                        ? n1
                        : under_cfg->k_majority.fixed_k;
    if (k > n0) {
        throw config_error("undersample count exceeds the majority class size");
    }

    // Uniform without-replacement subsample: Fisher-Yates prefix of I0.
    SplitMix64 rng(seed);
    for (std::size_t t = 0; t < k; ++t) {
        std::size_t r = t + rng.next_below(n0 - t);
        std::swap(majority[t], majority[r]);
    }

    double weight = 1.0 / static_cast<double>(k + n1);
    std::vector<WeightedSample> samples;
    samples.reserve(k + n1);
    for (std::size_t t = 0; t < k; ++t) {
        const auto& s = data.samples[majority[t]];
        samples.push_back(WeightedSample{s.x, 0, weight});
    }
    for (std::size_t i : data.indices(1)) {
        samples.push_back(WeightedSample{data.samples[i].x, 1, weight});
    }
    ErmStatus status;
    LogisticModel model = erm_with_fallback(samples, cfg.optimizer, &status);
    if (man != nullptr) man->optimizer_status = status;
    return model;
}

namespace {

LogisticModel plain_erm(const Dataset& data, const PipelineConfig& cfg,
                        ErmStatus* status) {
    if (data.size() == 0) throw config_error("cannot train on an empty dataset");
    double weight = 1.0 / static_cast<double>(data.size());
    std::vector<WeightedSample> samples;
    samples.reserve(data.size());
    for (const auto& s : data.samples) {
        samples.push_back(WeightedSample{s.x, s.y, weight});
    }
    return erm_with_fallback(samples, cfg.optimizer, status);
}

}  // namespace

PluginModel plugin_train(const Dataset& data, const PipelineConfig& cfg,
                         const MixtureSpec* spec, std::uint64_t seed,
                         RunManifest* man) {
    const auto* plug_cfg = std::get_if<PlugInCfg>(&cfg.method);
    if (plug_cfg == nullptr) {
        throw config_error("plugin_train requires a PlugIn method config");
    }
    begin_manifest(man, cfg, seed);

    PluginModel model;
    if (plug_cfg->prior_source == PriorSource::Known) {
        if (spec == nullptr) {
            throw config_error("plugin with known priors needs a mixture spec");
        }
        spec->validate();
        model.pi0 = spec->pi0;
        model.pi1 = spec->pi1;
    } else {
        std::size_t n0 = data.count(0);
        std::size_t n1 = data.count(1);
        if (n0 == 0 || n1 == 0) {
            throw degenerate_prior_error(
                "estimated priors are degenerate: one class is absent");
        }
        model.pi0 = static_cast<double>(n0) / static_cast<double>(data.size());
        model.pi1 = static_cast<double>(n1) / static_cast<double>(data.size());
    }
    ErmStatus status;
    model.g_hat = plain_erm(data, cfg, &status);
    if (man != nullptr) man->optimizer_status = status;
    return model;
}

LogisticModel erm_raw_train(const Dataset& data, const PipelineConfig& cfg,
                            RunManifest* man) {
    begin_manifest(man, cfg, 0);
    ErmStatus status;
    LogisticModel model = plain_erm(data, cfg, &status);
    if (man != nullptr) man->optimizer_status = status;
    return model;
}

}  // namespace rebal
