#pragma once

// Configuration-driven sweep over (dimension, train size, seed, method)
// cells: sample observed data, train the pipeline, score it against the
// closed-form balanced-posterior reference, and emit deterministic CSV.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rebal/mixture.hpp"
#include "rebal/pipelines.hpp"
#include "rebal/risk.hpp"

namespace rebal {

struct ExperimentConfig {
    // Mixture template: mu0 = 0, mu1 = mu1_base * 1_d, additionally scaled
    // by 1/sqrt(d) when scale_mu1 is set so the signal-to-noise ratio stays
    // constant across dimensions.
    double pi0 = 0.9;
    double sigma = 1.0;
    double mu1_base = 1.0;
    bool scale_mu1 = true;

    std::vector<std::size_t> dims;
    std::vector<std::size_t> train_sizes;
    std::vector<std::uint64_t> seeds;
    std::vector<PipelineConfig> methods;
    std::size_t n_eval = 10000;
    std::string output_dir;
    OptimizerSettings optimizer;

    void validate() const;
    MixtureSpec spec_for_dim(std::size_t d) const;
    static ExperimentConfig from_json(const std::string& text);
};

// Parses one method entry of the config ("methods" array element):
//   {"method": "rebalance", "generator": "smote:k=5", "j": "estimated"|int}
//   {"method": "undersample", "k": "match"|int}
//   {"method": "plugin", "prior": "known"|"estimated"}
//   {"method": "erm-raw"}
PipelineConfig pipeline_config_from_json(const std::string& text);

struct CellResult {
    std::size_t d = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::string generator = "-";
    std::size_t j = 0;
    RiskReport risk;
    std::string status = "ok";  // "ok", "ok_ridge", or an "error_*" tag

    std::string method_id() const;
    std::string csv_row() const;
};

inline constexpr char kResultsHeader[] =
    "d,n,seed,method,generator,J,excess_risk,excess_risk_se,est_error_q,"
    "type2_error,status";

// Per-cell seed streams, derived by hashing the cell identifiers so that no
// stream depends on execution order or worker count:
//   data stream: hash(seed, d, n, "data")        shared across methods
//   pipe stream: hash(seed, d, n, "pipe", method) per method
//   eval stream: hash(seed, d, n, "eval")        shared across methods
// Sharing data and eval streams across methods pairs the per-seed
// comparisons the ratio summary relies on.
std::uint64_t cell_data_seed(std::uint64_t seed, std::size_t d, std::size_t n);
std::uint64_t cell_pipe_seed(std::uint64_t seed, std::size_t d, std::size_t n,
                             const std::string& method_id);
std::uint64_t cell_eval_seed(std::uint64_t seed, std::size_t d, std::size_t n);

// Runs one cell; never throws for cell-level failures — they come back as
// an error status with NaN metrics.
CellResult run_cell(const ExperimentConfig& cfg, std::size_t d, std::size_t n,
                    std::uint64_t seed, const PipelineConfig& method);

struct ExperimentOutcome {
    std::vector<CellResult> results;  // canonical (d, n, seed, method) order
    std::size_t computed = 0;
    std::size_t reused = 0;
};

// Runs every cell (bounded by `workers` threads), writing results.csv under
// cfg.output_dir incrementally in canonical order.  With resume set, rows
// already present in an existing results.csv are reused verbatim and only
// missing cells are computed; the final file is identical to a fresh run's.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, bool resume,
                                 std::size_t workers,
                                 std::ostream* progress = nullptr);

struct RatioCell {
    std::size_t d = 0;
    std::size_t n = 0;
    double median_ratio = 0.0;
    double iqr_low = 0.0;
    double iqr_high = 0.0;
    std::size_t n_pairs = 0;
    std::size_t n_floored = 0;  // pairs where a nonpositive excess risk was
                                // floored at its standard error
    std::size_t n_gaps = 0;     // seeds missing a usable pair
};

// Per (d, n): the per-seed paired ratio excess(id_a) / excess(id_b), with
// nonpositive excess risks floored at their standard errors (flagged), then
// summarized by median and interquartile range.
std::vector<RatioCell> summarize_ratio(const std::vector<CellResult>& results,
                                       const std::string& id_a,
                                       const std::string& id_b);

inline constexpr char kSummaryHeader[] =
    "d,n,median_ratio,iqr_low,iqr_high,n_pairs,n_floored,n_gaps";

void write_summary_csv(std::ostream& out, const std::vector<RatioCell>& table);

}  // namespace rebal
