#include "rebal/generators.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "rebal/errors.hpp"
#include "rebal/knn.hpp"
#include "rebal/prng.hpp"

namespace rebal {

GeneratorSpec GeneratorSpec::bootstrap() { return GeneratorSpec{}; }

GeneratorSpec GeneratorSpec::smote(std::size_t k) {
    if (k == 0) throw config_error("smote requires k >= 1");
    GeneratorSpec g;
    g.kind = Kind::Smote;
    g.smote_k = k;
    return g;
}

GeneratorSpec GeneratorSpec::kde(std::optional<double> bandwidth) {
    if (bandwidth && !(*bandwidth > 0.0)) {
        throw config_error("kde requires a positive bandwidth");
    }
    GeneratorSpec g;
    g.kind = Kind::Kde;
    g.kde_bandwidth = bandwidth;
    return g;
}

GeneratorSpec GeneratorSpec::parse(std::string_view text) {
    if (text == "bootstrap") return bootstrap();
    if (text.rfind("smote:k=", 0) == 0) {
        std::string_view num = text.substr(8);
        std::size_t k = 0;
        auto [ptr, ec] = std::from_chars(num.begin(), num.end(), k);
        if (ec != std::errc{} || ptr != num.end() || k == 0) {
            throw config_error("bad generator string: " + std::string(text));
        }
        return smote(k);
    }
    if (text.rfind("kde:h=", 0) == 0) {
        std::string_view val = text.substr(6);
        if (val == "auto") return kde(std::nullopt);
        try {
            std::size_t used = 0;
            double h = std::stod(std::string(val), &used);
            if (used == val.size() && h > 0.0) return kde(h);
        } catch (const std::exception&) {
        }
        throw config_error("bad generator string: " + std::string(text));
    }
    throw config_error("unknown generator: " + std::string(text));
}

std::string GeneratorSpec::to_string() const {
    switch (kind) {
        case Kind::Bootstrap:
            return "bootstrap";
        case Kind::Smote:
            return "smote:k=" + std::to_string(smote_k);
        case Kind::Kde:
            if (!kde_bandwidth) return "kde:h=auto";
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", *kde_bandwidth);
            return std::string("kde:h=") + buf;
    }
    throw config_error("corrupt GeneratorSpec");
}

std::size_t choose_j(std::size_t n, std::size_t n0, std::size_t n1,
                     JMode mode, double pi0) {
    if (n0 + n1 != n) throw config_error("choose_j requires n = n0 + n1");
    if (mode == JMode::Estimated) {
        return n0 > n1 ? n0 - n1 : 0;
    }
    if (!(pi0 > 0.0 && pi0 < 1.0)) {
        throw config_error("choose_j Exact mode requires pi0 in (0,1)");
    }
    double j = std::ceil((2.0 * pi0 - 1.0) * static_cast<double>(n));
    return j > 0.0 ? static_cast<std::size_t>(j) : 0;
}

namespace {

void check_source(const std::vector<std::vector<double>>& minority,
                  std::size_t j) {
    if (j > 0 && minority.empty()) {
        throw insufficient_data_error(
            "synthetic sampling needs a nonempty minority set");
    }
    if (!minority.empty()) {
        std::size_t d = minority[0].size();
        for (const auto& p : minority) {
            if (p.size() != d) {
                throw config_error("minority points disagree on dimension");
            }
        }
    }
}

}  // namespace

SyntheticBatch bootstrap_sample(const std::vector<std::vector<double>>& minority,
                                std::size_t j, std::uint64_t seed) {
    check_source(minority, j);
    SyntheticBatch batch;
    batch.generator = GeneratorSpec::bootstrap();
    batch.source_size = minority.size();
    batch.points.reserve(j);
    batch.source_index.reserve(j);
    SplitMix64 rng(seed);
    for (std::size_t t = 0; t < j; ++t) {
        std::size_t i = rng.next_below(minority.size());
        batch.points.push_back(minority[i]);
        batch.source_index.push_back(i);
    }
    return batch;
}

SyntheticBatch smote_sample(const std::vector<std::vector<double>>& minority,
                            std::size_t k, std::size_t j, std::uint64_t seed) {
    if (k == 0) throw config_error("smote requires k >= 1");
    check_source(minority, j);
    SyntheticBatch batch;
    batch.generator = GeneratorSpec::smote(k);
    batch.source_size = minority.size();
    if (j == 0) return batch;
    std::size_t n1 = minority.size();
    if (n1 <= k) {
        throw insufficient_data_error(
            "smote requires n1 >= k + 1 (each point needs k neighbors "
            "excluding itself); k is never silently reduced");
    }
    std::size_t d = minority[0].size();

    // Exact brute-force neighbor lists, computed once per batch.
    std::vector<std::vector<std::size_t>> neighbors(n1);
    for (std::size_t i = 0; i < n1; ++i) {
        neighbors[i] = knn_scan(minority, i, k);
    }

    batch.points.reserve(j);
    batch.source_index.reserve(j);
    batch.smote_trace.reserve(j);
    SplitMix64 rng(seed);
    std::vector<double> out(d);
    for (std::size_t t = 0; t < j; ++t) {
        std::size_t i = rng.next_below(n1);
        std::size_t m = neighbors[i][rng.next_below(k)];
        double lambda = rng.next_uniform();
        for (std::size_t c = 0; c < d; ++c) {
            out[c] = minority[i][c] + lambda * (minority[m][c] - minority[i][c]);
        }
        batch.points.push_back(out);
        batch.source_index.push_back(i);
        batch.smote_trace.push_back(SmoteTrace{i, m, lambda});
    }
    return batch;
}

double silverman_bandwidth(const std::vector<std::vector<double>>& points) {
    if (points.empty()) {
        throw insufficient_data_error("silverman_bandwidth needs data");
    }
    std::size_t n = points.size();
    std::size_t d = points[0].size();
    if (n == 1) return 0.0;  // degenerate: KDE collapses onto the point
    double sigma_sum = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (const auto& p : points) mean += p[c];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (const auto& p : points) {
            double dv = p[c] - mean;
            ss += dv * dv;
        }
        sigma_sum += std::sqrt(ss / static_cast<double>(n - 1));
    }
    double sigma_hat = sigma_sum / static_cast<double>(d);
    return 1.06 * sigma_hat *
           std::pow(static_cast<double>(n), -1.0 / (4.0 + static_cast<double>(d)));
}

SyntheticBatch kde_sample(const std::vector<std::vector<double>>& minority,
                          std::optional<double> bandwidth, std::size_t j,
                          std::uint64_t seed) {
    if (bandwidth && !(*bandwidth > 0.0)) {
        throw config_error("kde requires a positive bandwidth");
    }
    check_source(minority, j);
    SyntheticBatch batch;
    batch.generator = GeneratorSpec::kde(bandwidth);
    batch.source_size = minority.size();
    if (j == 0) return batch;
    double h = bandwidth ? *bandwidth : silverman_bandwidth(minority);
    std::size_t d = minority[0].size();
    batch.points.reserve(j);
    batch.source_index.reserve(j);
    SplitMix64 rng(seed);
    std::vector<double> out(d);
    for (std::size_t t = 0; t < j; ++t) {
        std::size_t i = rng.next_below(minority.size());
        for (std::size_t c = 0; c < d; ++c) {
            out[c] = minority[i][c] + h * rng.next_normal();
        }
        batch.points.push_back(out);
        batch.source_index.push_back(i);
    }
    return batch;
}

SyntheticBatch generate(const GeneratorSpec& spec,
                        const std::vector<std::vector<double>>& minority,
                        std::size_t j, std::uint64_t seed) {
    switch (spec.kind) {
        case GeneratorSpec::Kind::Bootstrap:
            return bootstrap_sample(minority, j, seed);
        case GeneratorSpec::Kind::Smote:
            return smote_sample(minority, spec.smote_k, j, seed);
        case GeneratorSpec::Kind::Kde:
            return kde_sample(minority, spec.kde_bandwidth, j, seed);
    }
    throw config_error("corrupt GeneratorSpec");
}

}  // namespace rebal
