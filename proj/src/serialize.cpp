#include "rebal/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "rebal/errors.hpp"

namespace rebal {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
        throw config_error(std::string("malformed JSON for ") + what);
    }
    return j;
}

template <typename T>
T field(const json& j, const char* key, const char* what) {
    if (!j.contains(key)) {
        throw config_error(std::string(what) + " JSON is missing \"" + key + "\"");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(std::string(what) + " JSON field \"" + key +
                           "\" has the wrong type");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json logistic_json(const LogisticModel& model) {
    return json{{"w", model.w}, {"b", model.b}, {"clip_eps", model.clip_eps}};
}

LogisticModel logistic_from(const json& j) {
    LogisticModel m;
    m.w = field<std::vector<double>>(j, "w", "model");
    m.b = field<double>(j, "b", "model");
    m.clip_eps = field<double>(j, "clip_eps", "model");
    if (!(m.clip_eps > 0.0 && m.clip_eps < 0.5)) {
        throw config_error("model clip_eps must lie in (0, 1/2)");
    }
    return m;
}

}  // namespace

std::string mixture_to_json(const MixtureSpec& spec) {
    spec.validate();
    json j{{"pi0", spec.pi0},
           {"mu0", spec.mu0},
           {"mu1", spec.mu1},
           {"sigma", spec.sigma}};
    return j.dump();
}

MixtureSpec mixture_from_json(const std::string& text) {
    json j = parse_json(text, "mixture spec");
    return MixtureSpec::make(field<double>(j, "pi0", "mixture spec"),
                             field<std::vector<double>>(j, "mu0", "mixture spec"),
                             field<std::vector<double>>(j, "mu1", "mixture spec"),
                             field<double>(j, "sigma", "mixture spec"));
}

void dataset_to_csv(std::ostream& out, const Dataset& data) {
    if (data.dim == 0) throw config_error("cannot serialize a zero-dim dataset");
    for (std::size_t c = 0; c < data.dim; ++c) {
        out << 'x' << c << ',';
    }
    out << "y\n";
    for (const auto& s : data.samples) {
        if (s.x.size() != data.dim) {
            throw config_error("dataset sample dimension mismatch");
        }
        for (double v : s.x) out << format_double(v) << ',';
        out << s.y << '\n';
    }
}

Dataset dataset_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw config_error("dataset CSV is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::size_t dim = 0;
    {
        std::stringstream header(line);
        std::string col;
        bool saw_y = false;
        while (std::getline(header, col, ',')) {
            if (saw_y) throw config_error("dataset CSV columns after y");
            if (col == "y") {
                saw_y = true;
            } else if (col == "x" + std::to_string(dim)) {
                ++dim;
            } else {
                throw config_error("unexpected dataset CSV column: " + col);
            }
        }
        if (!saw_y || dim == 0) {
            throw config_error("dataset CSV header must be x0,...,y");
        }
    }

    Dataset data;
    data.dim = dim;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        LabeledSample s;
        s.x.reserve(dim);
        for (std::size_t c = 0; c < dim + 1; ++c) {
            if (!std::getline(row, cell, ',')) {
                throw config_error("dataset CSV row " + std::to_string(lineno) +
                                   " has too few columns");
            }
            char* end = nullptr;
            double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw config_error("dataset CSV row " + std::to_string(lineno) +
                                   " has a malformed number: " + cell);
            }
            if (c < dim) {
                s.x.push_back(v);
            } else if (v == 0.0 || v == 1.0) {
                s.y = static_cast<int>(v);
            } else {
                throw config_error("dataset CSV row " + std::to_string(lineno) +
                                   " has a non-binary label");
            }
        }
        if (std::getline(row, cell, ',')) {
            throw config_error("dataset CSV row " + std::to_string(lineno) +
                               " has too many columns");
        }
        data.samples.push_back(std::move(s));
    }
    return data;
}

std::string logistic_to_json(const LogisticModel& model) {
    return logistic_json(model).dump();
}

LogisticModel logistic_from_json(const std::string& text) {
    return logistic_from(parse_json(text, "model"));
}

std::string plugin_to_json(const PluginModel& model) {
    json j{{"g_hat", logistic_json(model.g_hat)},
           {"pi0", model.pi0},
           {"pi1", model.pi1}};
    return j.dump();
}

double TrainedModel::predict(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

TrainedModel model_from_json(const std::string& text) {
    json j = parse_json(text, "model");
    TrainedModel out;
    if (j.contains("g_hat")) {
        PluginModel m;
        m.g_hat = logistic_from(j.at("g_hat"));
        m.pi0 = field<double>(j, "pi0", "plugin model");
        m.pi1 = field<double>(j, "pi1", "plugin model");
        if (!(m.pi0 > 0.0 && m.pi0 < 1.0) ||
            std::abs(m.pi0 + m.pi1 - 1.0) > 1e-12) {
            throw config_error("plugin model priors must be interior and sum to 1");
        }
        out.model = std::move(m);
    } else {
        out.model = logistic_from(j);
    }
    return out;
}

std::string model_to_json(const TrainedModel& model) {
    if (const auto* p = std::get_if<PluginModel>(&model.model)) {
        return plugin_to_json(*p);
    }
    return logistic_to_json(std::get<LogisticModel>(model.model));
}

std::string risk_to_json(const RiskReport& report) {
    json j{{"excess_risk", report.excess_risk},
           {"excess_risk_se", report.excess_risk_se},
           {"est_error_q", report.est_error_q},
           {"type2_error", report.type2_error},
           {"n_eval", report.n_eval}};
    return j.dump();
}

std::string manifest_to_json(const RunManifest& manifest) {
    json j{{"seed", manifest.seed},
           {"j", manifest.j},
           {"method", manifest.method},
           {"generator", manifest.generator},
           {"optimizer",
            json{{"iters", manifest.optimizer_status.iters},
                 {"grad_norm", manifest.optimizer_status.grad_norm},
                 {"ridge_fallback", manifest.optimizer_status.ridge_fallback}}}};
    return j.dump();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw config_error("error reading file: " + path);
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot create file: " + path);
    out << content;
    out.flush();
    if (!out) throw config_error("error writing file: " + path);
}

}  // namespace rebal
