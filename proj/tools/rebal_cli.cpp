// Command-line front end: dataset generation, pipeline training, risk
// evaluation, the experiment sweep, and the diagnostic suites.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 diagnostic failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "rebal/diagnostics.hpp"
#include "rebal/errors.hpp"
#include "rebal/experiment.hpp"
#include "rebal/mixture.hpp"
#include "rebal/pipelines.hpp"
#include "rebal/risk.hpp"
#include "rebal/serialize.hpp"

namespace {

using namespace rebal;

struct TrainFlags {
    std::string data_path;
    std::string method = "erm-raw";
    std::string generator = "bootstrap";
    std::optional<std::size_t> fixed_j;
    std::optional<std::size_t> fixed_k;
    std::string prior = "estimated";
    std::string spec_path;
    double target_pi0 = 0.5;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string manifest_path;
    OptimizerSettings optimizer;
};

PipelineConfig build_pipeline_config(const TrainFlags& f) {
    PipelineConfig cfg;
    cfg.target = TargetSpec::make(f.target_pi0);
    cfg.optimizer = f.optimizer;
    if (f.method == "rebalance") {
        RebalanceCfg r;
        r.generator = GeneratorSpec::parse(f.generator);
        r.j = f.fixed_j ? JRule::fixed(*f.fixed_j) : JRule::estimated();
        cfg.method = r;
    } else if (f.method == "undersample") {
        UndersampleCfg u;
        u.k_majority =
            f.fixed_k ? KRule::fixed(*f.fixed_k) : KRule::match_minority();
        cfg.method = u;
    } else if (f.method == "plugin") {
        PlugInCfg p;
        if (f.prior == "known") {
            p.prior_source = PriorSource::Known;
        } else if (f.prior == "estimated") {
            p.prior_source = PriorSource::Estimated;
        } else {
            throw config_error("--prior must be known or estimated");
        }
        cfg.method = p;
    } else if (f.method == "erm-raw") {
        cfg.method = ErmRawCfg{};
    } else {
        throw config_error(
            "--method must be rebalance, undersample, plugin, or erm-raw");
    }
    return cfg;
}

int run_generate(const std::string& spec_path, std::size_t n,
                 std::uint64_t seed, const std::string& out_path,
                 std::optional<double> target_pi0) {
    MixtureSpec spec = mixture_from_json(read_text_file(spec_path));
    Dataset data =
        target_pi0 ? sample_target(spec, TargetSpec::make(*target_pi0), n, seed)
                   : sample_observed(spec, n, seed);
    std::ostringstream csv;
    dataset_to_csv(csv, data);
    write_text_file(out_path, csv.str());
    std::cout << "wrote " << data.size() << " samples (dim " << data.dim
              << ") to " << out_path << "\n";
    return 0;
}

int run_train(const TrainFlags& f) {
    PipelineConfig cfg = build_pipeline_config(f);
    std::ifstream in(f.data_path);
    if (!in) throw config_error("cannot open data file: " + f.data_path);
    Dataset data = dataset_from_csv(in);

    MixtureSpec spec;
    const MixtureSpec* spec_ptr = nullptr;
    if (!f.spec_path.empty()) {
        spec = mixture_from_json(read_text_file(f.spec_path));
        spec_ptr = &spec;
    }

    RunManifest manifest;
    TrainedModel model;
    if (std::holds_alternative<RebalanceCfg>(cfg.method)) {
        model.model = rebalance_train(data, cfg, f.seed, &manifest);
    } else if (std::holds_alternative<UndersampleCfg>(cfg.method)) {
        model.model = undersample_train(data, cfg, f.seed, &manifest);
    } else if (std::holds_alternative<PlugInCfg>(cfg.method)) {
        model.model = plugin_train(data, cfg, spec_ptr, f.seed, &manifest);
    } else {
        model.model = erm_raw_train(data, cfg, &manifest);
    }

    write_text_file(f.out_path, model_to_json(model) + "\n");
    if (!f.manifest_path.empty()) {
        write_text_file(f.manifest_path, manifest_to_json(manifest) + "\n");
    }
    std::cout << "trained " << cfg.id() << " on " << data.size()
              << " samples (J = " << manifest.j << ", iters = "
              << manifest.optimizer_status.iters << ") -> " << f.out_path
              << "\n";
    return 0;
}

int run_evaluate(const std::string& model_path, const std::string& spec_path,
                 double target_pi0, std::size_t n_eval, std::uint64_t seed,
                 const std::string& out_path) {
    TrainedModel model = model_from_json(read_text_file(model_path));
    MixtureSpec spec = mixture_from_json(read_text_file(spec_path));
    LogisticModel fstar = fstar_gaussian(spec);
    RiskReport report = evaluate_risk(model, fstar, spec,
                                      TargetSpec::make(target_pi0), n_eval,
                                      seed);
    std::string json = risk_to_json(report);
    if (!out_path.empty()) write_text_file(out_path, json + "\n");
    std::cout << json << "\n";
    return 0;
}

std::size_t resolve_workers(std::size_t flag_value) {
    const char* env = std::getenv("RL_WORKERS");
    if (env != nullptr && *env != '\0') {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0' || v == 0) {
            throw config_error(
                "RL_WORKERS must be a positive integer, got: " +
                std::string(env));
        }
        return static_cast<std::size_t>(v);
    }
    if (flag_value > 0) return flag_value;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

int run_experiment_cmd(const std::string& config_path, bool resume,
                       std::size_t workers_flag, bool quiet) {
    ExperimentConfig cfg = ExperimentConfig::from_json(read_text_file(config_path));
    std::size_t workers = resolve_workers(workers_flag);
    ExperimentOutcome outcome =
        run_experiment(cfg, resume, workers, quiet ? nullptr : &std::cerr);
    std::cout << "cells: " << outcome.results.size() << " ("
              << outcome.computed << " computed, " << outcome.reused
              << " reused)\n";

    // Pair the first SMOTE-rebalance method against the first bootstrap one
    // for the headline ratio table; other method sets get results.csv only.
    std::string id_smote, id_boot;
    for (const auto& m : cfg.methods) {
        std::string gen = m.generator_name();
        if (id_smote.empty() && gen.rfind("smote:", 0) == 0) id_smote = m.id();
        if (id_boot.empty() && gen == "bootstrap") id_boot = m.id();
    }
    std::vector<RatioCell> table;
    if (!id_smote.empty() && !id_boot.empty()) {
        table = summarize_ratio(outcome.results, id_smote, id_boot);
    } else {
        std::cerr << "note: no smote/bootstrap method pair; summary.csv has "
                     "header only\n";
    }
    std::ostringstream summary;
    write_summary_csv(summary, table);
    write_text_file(cfg.output_dir + "/summary.csv", summary.str());
    std::cout << summary.str();
    return 0;
}

int run_diag(const std::string& suite_str, std::uint64_t seed,
             const std::string& out_path) {
    DiagSuite suite = parse_suite(suite_str);
    std::vector<DiagRow> rows = run_diagnostics(suite, seed);
    std::ostringstream csv;
    write_diag_csv(csv, suite, rows);
    if (!out_path.empty()) write_text_file(out_path, csv.str());
    std::cout << csv.str();
    if (!all_pass(rows)) {
        std::cerr << "diagnostic failures in suite " << suite_name(suite)
                  << ":\n";
        for (const auto& r : rows) {
            if (!r.pass) {
                std::cerr << "  " << r.check << ": value " << r.value
                          << " > threshold " << r.threshold << "\n";
            }
        }
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Imbalanced binary classification toolkit: synthetic rebalancing, "
        "undersampling, plug-in reweighting, and their evaluation harness"};
    app.require_subcommand(1);

    // generate
    std::string gen_spec, gen_out;
    std::size_t gen_n = 1000;
    std::uint64_t gen_seed = 0;
    double gen_target_pi0 = -1.0;
    auto* generate = app.add_subcommand("generate", "Sample a dataset to CSV");
    generate->add_option("--spec", gen_spec, "Mixture spec JSON file")
        ->required();
    generate->add_option("--n", gen_n, "Number of samples")->required();
    generate->add_option("--seed", gen_seed, "Sampling seed")->required();
    generate->add_option("--out", gen_out, "Output CSV path")->required();
    generate->add_option(
        "--target-pi0", gen_target_pi0,
        "Sample with this majority prior instead of the spec's");

    // train
    TrainFlags tf;
    auto* train = app.add_subcommand("train", "Train one pipeline");
    train->add_option("--data", tf.data_path, "Training dataset CSV")
        ->required();
    train->add_option("--method", tf.method,
                      "rebalance | undersample | plugin | erm-raw")
        ->required();
    train->add_option("--generator", tf.generator,
                      "Synthetic generator (bootstrap, smote:k=5, kde:h=auto)");
    train->add_option("--j", tf.fixed_j,
                      "Fixed synthetic count (default: estimated from data)");
    train->add_option("--k", tf.fixed_k,
                      "Fixed majority subsample size (default: match minority)");
    train->add_option("--prior", tf.prior,
                      "Plug-in prior source: known | estimated");
    train->add_option("--spec", tf.spec_path,
                      "Mixture spec JSON (required for --prior known)");
    train->add_option("--target-pi0", tf.target_pi0,
                      "Target majority prior (default 0.5, the balanced case)");
    train->add_option("--seed", tf.seed, "Pipeline seed")->required();
    train->add_option("--out", tf.out_path, "Output model JSON path")
        ->required();
    train->add_option("--manifest", tf.manifest_path,
                      "Also write the run manifest JSON here");
    train->add_option("--grad-tol", tf.optimizer.grad_tol,
                      "Optimizer gradient tolerance");
    train->add_option("--max-iters", tf.optimizer.max_iters,
                      "Optimizer iteration cap");
    train->add_option("--ridge", tf.optimizer.ridge_lambda,
                      "Ridge penalty on the weights");

    // evaluate
    std::string ev_model, ev_spec, ev_out;
    double ev_target_pi0 = 0.5;
    std::size_t ev_n = 10000;
    std::uint64_t ev_seed = 0;
    auto* evaluate =
        app.add_subcommand("evaluate", "Monte Carlo risk report for a model");
    evaluate->add_option("--model", ev_model, "Model JSON file")->required();
    evaluate->add_option("--spec", ev_spec, "Mixture spec JSON file")
        ->required();
    evaluate->add_option("--target-pi0", ev_target_pi0,
                         "Evaluation majority prior (default 0.5)");
    evaluate->add_option("--n-eval", ev_n, "Monte Carlo sample count");
    evaluate->add_option("--seed", ev_seed, "Evaluation seed")->required();
    evaluate->add_option("--out", ev_out, "Also write the report JSON here");

    // experiment
    std::string ex_config;
    bool ex_resume = false, ex_quiet = false;
    std::size_t ex_workers = 0;
    auto* experiment =
        app.add_subcommand("experiment", "Run the configured sweep");
    experiment->add_option("--config", ex_config, "Experiment config JSON")
        ->required();
    experiment->add_flag("--resume", ex_resume,
                         "Reuse rows already present in results.csv");
    experiment->add_option(
        "--workers", ex_workers,
        "Worker thread count (default: hardware; RL_WORKERS overrides)");
    experiment->add_flag("--quiet", ex_quiet, "Suppress per-cell progress");

    // diag
    std::string dg_suite, dg_out;
    std::uint64_t dg_seed = 20240917;
    auto* diag = app.add_subcommand("diag", "Run a diagnostic suite");
    diag->add_option("--suite", dg_suite,
                     "formulas | coupling | geometry | plugin-bound")
        ->required();
    diag->add_option("--seed", dg_seed, "Suite seed");
    diag->add_option("--out", dg_out, "Also write the CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            std::optional<double> target;
            if (gen_target_pi0 >= 0.0) target = gen_target_pi0;
            return run_generate(gen_spec, gen_n, gen_seed, gen_out, target);
        }
        if (train->parsed()) return run_train(tf);
        if (evaluate->parsed()) {
            return run_evaluate(ev_model, ev_spec, ev_target_pi0, ev_n, ev_seed,
                                ev_out);
        }
        if (experiment->parsed()) {
            return run_experiment_cmd(ex_config, ex_resume, ex_workers,
                                      ex_quiet);
        }
        if (diag->parsed()) return run_diag(dg_suite, dg_seed, dg_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;  // unreachable with require_subcommand(1)
}
