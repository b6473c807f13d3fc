#include "rebal/experiment.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rebal/errors.hpp"
#include "rebal/prng.hpp"
#include "rebal/serialize.hpp"
#include "rebal/stats.hpp"

namespace rebal {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!(pi0 > 0.0 && pi0 < 1.0)) {
        throw config_error("experiment pi0 must lie strictly in (0,1)");
    }
    if (!(sigma > 0.0)) throw config_error("experiment sigma must be positive");
    if (dims.empty() || train_sizes.empty() || seeds.empty() || methods.empty()) {
        throw config_error(
            "experiment needs nonempty dims, train_sizes, seeds, and methods");
    }
    for (std::size_t d : dims) {
        if (d == 0) throw config_error("experiment dims must be positive");
    }
    for (std::size_t n : train_sizes) {
        if (n == 0) throw config_error("experiment train sizes must be positive");
    }
    if (n_eval < 10000) {
        throw config_error("experiment n_eval must be at least 10000");
    }
    if (output_dir.empty()) throw config_error("experiment output_dir is required");
    std::map<std::string, int> ids;
    for (const auto& m : methods) {
        if (++ids[m.id()] > 1) {
            throw config_error("duplicate experiment method: " + m.id());
        }
    }
    std::map<std::uint64_t, int> seen;
    for (std::uint64_t s : seeds) {
        if (++seen[s] > 1) throw config_error("duplicate experiment seed");
    }
}

MixtureSpec ExperimentConfig::spec_for_dim(std::size_t d) const {
    double scale = scale_mu1 ? 1.0 / std::sqrt(static_cast<double>(d)) : 1.0;
    std::vector<double> mu0(d, 0.0);
    std::vector<double> mu1(d, mu1_base * scale);
    return MixtureSpec::make(pi0, std::move(mu0), std::move(mu1), sigma);
}

namespace {

PipelineConfig pipeline_config_from(const json& j,
                                    const OptimizerSettings& optimizer) {
    if (!j.is_object() || !j.contains("method")) {
        throw config_error("each method entry needs a \"method\" field");
    }
    std::string name = j.at("method").get<std::string>();
    PipelineConfig cfg;
    cfg.optimizer = optimizer;
    if (name == "rebalance") {
        RebalanceCfg r;
        r.generator = GeneratorSpec::parse(
            j.value("generator", std::string("bootstrap")));
        if (j.contains("j") && j.at("j").is_number()) {
            r.j = JRule::fixed(j.at("j").get<std::size_t>());
        } else {
            std::string rule = j.value("j", std::string("estimated"));
            if (rule != "estimated") {
                throw config_error("rebalance \"j\" must be \"estimated\" or an integer");
            }
            r.j = JRule::estimated();
        }
        cfg.method = r;
    } else if (name == "undersample") {
        UndersampleCfg u;
        if (j.contains("k") && j.at("k").is_number()) {
            u.k_majority = KRule::fixed(j.at("k").get<std::size_t>());
        } else {
            std::string rule = j.value("k", std::string("match"));
            if (rule != "match") {
                throw config_error("undersample \"k\" must be \"match\" or an integer");
            }
            u.k_majority = KRule::match_minority();
        }
        cfg.method = u;
    } else if (name == "plugin") {
        PlugInCfg p;
        std::string prior = j.value("prior", std::string("estimated"));
        if (prior == "known") {
            p.prior_source = PriorSource::Known;
        } else if (prior == "estimated") {
            p.prior_source = PriorSource::Estimated;
        } else {
            throw config_error("plugin \"prior\" must be \"known\" or \"estimated\"");
        }
        cfg.method = p;
    } else if (name == "erm-raw") {
        cfg.method = ErmRawCfg{};
    } else {
        throw config_error("unknown method: " + name);
    }
    return cfg;
}

}  // namespace

PipelineConfig pipeline_config_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw config_error("malformed JSON for method config");
    return pipeline_config_from(j, OptimizerSettings{});
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw config_error("malformed JSON for experiment config");
    if (!j.is_object()) throw config_error("experiment config must be an object");

    ExperimentConfig cfg;
    try {
        if (j.contains("spec_template")) {
            const json& t = j.at("spec_template");
            cfg.pi0 = t.value("pi0", cfg.pi0);
            cfg.sigma = t.value("sigma", cfg.sigma);
            cfg.mu1_base = t.value("mu1_base", cfg.mu1_base);
            cfg.scale_mu1 = t.value("scale_mu1", cfg.scale_mu1);
        }
        cfg.dims = j.value("dims", cfg.dims);
        cfg.train_sizes = j.value("train_sizes", cfg.train_sizes);
        cfg.seeds = j.value("seeds", cfg.seeds);
        cfg.n_eval = j.value("n_eval", cfg.n_eval);
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
        if (j.contains("optimizer")) {
            const json& o = j.at("optimizer");
            cfg.optimizer.grad_tol = o.value("grad_tol", cfg.optimizer.grad_tol);
            cfg.optimizer.max_iters = o.value("max_iters", cfg.optimizer.max_iters);
            cfg.optimizer.ridge_lambda =
                o.value("ridge_lambda", cfg.optimizer.ridge_lambda);
        }
        if (!j.contains("methods") || !j.at("methods").is_array()) {
            throw config_error("experiment config needs a \"methods\" array");
        }
        for (const json& m : j.at("methods")) {
            cfg.methods.push_back(pipeline_config_from(m, cfg.optimizer));
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("experiment config field error: ") +
                           e.what());
    }
    cfg.validate();
    return cfg;
}

std::string CellResult::method_id() const {
    if (method == "rebalance") return method + ":" + generator;
    return method;
}

std::string CellResult::csv_row() const {
    std::ostringstream out;
    out << d << ',' << n << ',' << seed << ',' << method << ',' << generator
        << ',' << j << ',' << fmt(risk.excess_risk) << ','
        << fmt(risk.excess_risk_se) << ',' << fmt(risk.est_error_q) << ','
        << fmt(risk.type2_error) << ',' << status;
    return out.str();
}

std::uint64_t cell_data_seed(std::uint64_t seed, std::size_t d, std::size_t n) {
    return seed_hash({seed, d, n, hash_str("data")});
}

std::uint64_t cell_pipe_seed(std::uint64_t seed, std::size_t d, std::size_t n,
                             const std::string& method_id) {
    return seed_hash({seed, d, n, hash_str("pipe"), hash_str(method_id)});
}

std::uint64_t cell_eval_seed(std::uint64_t seed, std::size_t d, std::size_t n) {
    return seed_hash({seed, d, n, hash_str("eval")});
}

CellResult run_cell(const ExperimentConfig& cfg, std::size_t d, std::size_t n,
                    std::uint64_t seed, const PipelineConfig& method) {
    CellResult cell;
    cell.d = d;
    cell.n = n;
    cell.seed = seed;
    cell.method = method.method_name();
    cell.generator = method.generator_name();
    cell.risk = RiskReport{kNaN, kNaN, kNaN, kNaN, 0};

    RunManifest manifest;
    try {
        MixtureSpec spec = cfg.spec_for_dim(d);
        LogisticModel fstar = fstar_gaussian(spec);
        Dataset data = sample_observed(spec, n, cell_data_seed(seed, d, n));
        std::uint64_t pipe = cell_pipe_seed(seed, d, n, method.id());

        RiskReport risk;
        std::uint64_t eval = cell_eval_seed(seed, d, n);
        if (std::holds_alternative<RebalanceCfg>(method.method)) {
            LogisticModel m = rebalance_train(data, method, pipe, &manifest);
            risk = evaluate_risk(m, fstar, spec, TargetSpec::balanced(),
                                 cfg.n_eval, eval);
        } else if (std::holds_alternative<UndersampleCfg>(method.method)) {
            LogisticModel m = undersample_train(data, method, pipe, &manifest);
            risk = evaluate_risk(m, fstar, spec, TargetSpec::balanced(),
                                 cfg.n_eval, eval);
        } else if (std::holds_alternative<PlugInCfg>(method.method)) {
            PluginModel m = plugin_train(data, method, &spec, pipe, &manifest);
            risk = evaluate_risk(m, fstar, spec, TargetSpec::balanced(),
                                 cfg.n_eval, eval);
        } else {
            LogisticModel m = erm_raw_train(data, method, &manifest);
            risk = evaluate_risk(m, fstar, spec, TargetSpec::balanced(),
                                 cfg.n_eval, eval);
        }
        cell.j = manifest.j;
        cell.risk = risk;
        cell.status = manifest.optimizer_status.ridge_fallback ? "ok_ridge" : "ok";
    } catch (const insufficient_data_error&) {
        cell.j = manifest.j;
        cell.status = "error_insufficient_data";
    } catch (const degenerate_separation_error&) {
        cell.j = manifest.j;
        cell.status = "error_separation";
    } catch (const degenerate_prior_error&) {
        cell.j = manifest.j;
        cell.status = "error_prior";
    } catch (const convergence_error&) {
        cell.j = manifest.j;
        cell.status = "error_convergence";
    } catch (const config_error&) {
        cell.j = manifest.j;
        cell.status = "error_config";
    } catch (const std::exception&) {
        cell.j = manifest.j;
        cell.status = "error_runtime";
    }
    return cell;
}

namespace {

struct CellIds {
    std::size_t d;
    std::size_t n;
    std::uint64_t seed;
    std::size_t method_index;
};

// Key for matching resumed rows: everything identifying a cell.
std::string cell_key(std::size_t d, std::size_t n, std::uint64_t seed,
                     const std::string& method, const std::string& generator) {
    std::ostringstream key;
    key << d << ',' << n << ',' << seed << ',' << method << ',' << generator;
    return key.str();
}

// Loads raw rows of an existing results.csv keyed by cell identity.
std::map<std::string, std::string> load_existing_rows(
    const std::filesystem::path& file) {
    std::map<std::string, std::string> rows;
    std::ifstream in(file);
    if (!in) return rows;
    std::string line;
    if (!std::getline(in, line)) return rows;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kResultsHeader) {
        throw config_error("existing results.csv has an unexpected header; "
                           "refusing to resume over it");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        // First five fields form the key.
        std::size_t pos = 0;
        for (int field = 0; field < 5; ++field) {
            pos = line.find(',', pos);
            if (pos == std::string::npos) {
                throw config_error("existing results.csv row " +
                                   std::to_string(lineno) + " is malformed");
            }
            ++pos;
        }
        rows[line.substr(0, pos - 1)] = line;
    }
    return rows;
}

CellResult parse_row(const std::string& line) {
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> fields;
    while (std::getline(row, cell, ',')) fields.push_back(cell);
    if (fields.size() != 11) {
        throw config_error("results.csv row does not have 11 fields: " + line);
    }
    CellResult r;
    try {
        r.d = std::stoull(fields[0]);
        r.n = std::stoull(fields[1]);
        r.seed = std::stoull(fields[2]);
        r.method = fields[3];
        r.generator = fields[4];
        r.j = std::stoull(fields[5]);
        r.risk.excess_risk = std::strtod(fields[6].c_str(), nullptr);
        r.risk.excess_risk_se = std::strtod(fields[7].c_str(), nullptr);
        r.risk.est_error_q = std::strtod(fields[8].c_str(), nullptr);
        r.risk.type2_error = std::strtod(fields[9].c_str(), nullptr);
        r.status = fields[10];
    } catch (const std::logic_error&) {
        throw config_error("results.csv row has malformed numbers: " + line);
    }
    return r;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, bool resume,
                                 std::size_t workers, std::ostream* progress) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::path out_dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw config_error("cannot create output directory: " + cfg.output_dir);
    }
    fs::path results_file = out_dir / "results.csv";

    // Canonical cell order: dims, then sizes, then seeds, then methods, in
    // config order.
    std::vector<CellIds> cells;
    for (std::size_t d : cfg.dims) {
        for (std::size_t n : cfg.train_sizes) {
            for (std::uint64_t seed : cfg.seeds) {
                for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                    cells.push_back(CellIds{d, n, seed, m});
                }
            }
        }
    }

    std::map<std::string, std::string> existing;
    if (resume) existing = load_existing_rows(results_file);

    // Rows land in fixed slots, so worker scheduling cannot affect output.
    std::vector<std::optional<std::string>> slots(cells.size());
    ExperimentOutcome outcome;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const CellIds& c = cells[i];
        const PipelineConfig& method = cfg.methods[c.method_index];
        auto it = existing.find(cell_key(c.d, c.n, c.seed, method.method_name(),
                                         method.generator_name()));
        if (it != existing.end()) {
            slots[i] = it->second;
            ++outcome.reused;
        }
    }

    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (slots[i].has_value()) continue;  // resumed row
            }
            const CellIds& c = cells[i];
            CellResult r =
                run_cell(cfg, c.d, c.n, c.seed, cfg.methods[c.method_index]);
            {
                std::lock_guard<std::mutex> lock(mu);
                slots[i] = r.csv_row();
            }
            cv.notify_one();
        }
    };

    if (workers == 0) workers = 1;
    workers = std::min(workers, cells.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);

    // Single serialization point: emit rows in canonical order as they
    // become available.
    {
        std::ofstream out(results_file, std::ios::binary | std::ios::trunc);
        if (!out) {
            for (auto& t : pool) t.join();
            throw config_error("cannot write results file: " +
                               results_file.string());
        }
        out << kResultsHeader << '\n';
        std::unique_lock<std::mutex> lock(mu);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            cv.wait(lock, [&] { return slots[i].has_value(); });
            out << *slots[i] << '\n';
            out.flush();
            if (progress != nullptr) {
                *progress << "cell " << (i + 1) << "/" << cells.size() << " "
                          << *slots[i] << "\n";
            }
        }
    }
    for (auto& t : pool) t.join();

    outcome.results.reserve(cells.size());
    for (const auto& slot : slots) outcome.results.push_back(parse_row(*slot));
    outcome.computed = cells.size() - outcome.reused;
    return outcome;
}

std::vector<RatioCell> summarize_ratio(const std::vector<CellResult>& results,
                                       const std::string& id_a,
                                       const std::string& id_b) {
    if (id_a == id_b) {
        throw config_error("ratio summary needs two distinct method ids");
    }
    // (d, n) -> seed -> per-side result.
    std::map<std::pair<std::size_t, std::size_t>,
             std::map<std::uint64_t, std::pair<const CellResult*,
                                               const CellResult*>>>
        cells;
    for (const auto& r : results) {
        std::string id = r.method_id();
        if (id != id_a && id != id_b) continue;
        auto& pair = cells[{r.d, r.n}][r.seed];
        (id == id_a ? pair.first : pair.second) = &r;
    }

    std::vector<RatioCell> table;
    for (const auto& [dn, seeds] : cells) {
        RatioCell cell;
        cell.d = dn.first;
        cell.n = dn.second;
        std::vector<double> ratios;
        for (const auto& [seed, pair] : seeds) {
            const CellResult* a = pair.first;
            const CellResult* b = pair.second;
            bool ok_a = a != nullptr && a->status.rfind("ok", 0) == 0 &&
                        std::isfinite(a->risk.excess_risk);
            bool ok_b = b != nullptr && b->status.rfind("ok", 0) == 0 &&
                        std::isfinite(b->risk.excess_risk);
            if (!ok_a || !ok_b) {
                ++cell.n_gaps;
                continue;
            }
            bool floored = false;
            double ea = a->risk.excess_risk;
            if (ea <= 0.0) {
                ea = a->risk.excess_risk_se;
                floored = true;
            }
            double eb = b->risk.excess_risk;
            if (eb <= 0.0) {
                eb = b->risk.excess_risk_se;
                floored = true;
            }
            if (!(eb > 0.0)) {  // zero spread even after flooring
                ++cell.n_gaps;
                continue;
            }
            if (floored) ++cell.n_floored;
            ratios.push_back(ea / eb);
        }
        cell.n_pairs = ratios.size();
        if (!ratios.empty()) {
            cell.median_ratio = median(ratios);
            cell.iqr_low = quantile(ratios, 0.25);
            cell.iqr_high = quantile(ratios, 0.75);
        } else {
            cell.median_ratio = kNaN;
            cell.iqr_low = kNaN;
            cell.iqr_high = kNaN;
        }
        table.push_back(cell);
    }
    return table;
}

void write_summary_csv(std::ostream& out, const std::vector<RatioCell>& table) {
    out << kSummaryHeader << '\n';
    for (const auto& c : table) {
        out << c.d << ',' << c.n << ',' << fmt(c.median_ratio) << ','
            << fmt(c.iqr_low) << ',' << fmt(c.iqr_high) << ',' << c.n_pairs
            << ',' << c.n_floored << ',' << c.n_gaps << '\n';
    }
}

}  // namespace rebal
