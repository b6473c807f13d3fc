#pragma once

// JSON and CSV interchange for specs, datasets, models, and reports.  JSON
// shapes:
//   MixtureSpec    {"pi0": 0.9, "mu0": [...], "mu1": [...], "sigma": 1.0}
//   LogisticModel  {"w": [...], "b": ..., "clip_eps": ...}
//   PluginModel    {"g_hat": {logistic fields}, "pi0": ..., "pi1": ...}
// Dataset CSV carries the header x0,...,x{d-1},y with round-trip-exact
// floating-point formatting.

#include <iosfwd>
#include <span>
#include <string>
#include <variant>

#include "rebal/logistic.hpp"
#include "rebal/mixture.hpp"
#include "rebal/pipelines.hpp"
#include "rebal/risk.hpp"

namespace rebal {

std::string mixture_to_json(const MixtureSpec& spec);
MixtureSpec mixture_from_json(const std::string& text);

void dataset_to_csv(std::ostream& out, const Dataset& data);
Dataset dataset_from_csv(std::istream& in);

std::string logistic_to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const std::string& text);

std::string plugin_to_json(const PluginModel& model);

// Either trained-model shape, distinguished by the presence of "g_hat".
struct TrainedModel {
    std::variant<LogisticModel, PluginModel> model;

    double predict(std::span<const double> x) const;
};
TrainedModel model_from_json(const std::string& text);
std::string model_to_json(const TrainedModel& model);

std::string risk_to_json(const RiskReport& report);
std::string manifest_to_json(const RunManifest& manifest);

// Whole-file helpers; failures surface as config_error with the path named.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace rebal
