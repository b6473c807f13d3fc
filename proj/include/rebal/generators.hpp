#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rebal {

// Tagged description of a synthetic-minority sampling procedure.
// Config-string forms: "bootstrap", "smote:k=5", "kde:h=auto", "kde:h=0.3".
struct GeneratorSpec {
    enum class Kind { Bootstrap, Smote, Kde };

    Kind kind = Kind::Bootstrap;
    std::size_t smote_k = 5;                 // Smote only, k >= 1
    std::optional<double> kde_bandwidth;     // Kde only; nullopt = Silverman

    static GeneratorSpec bootstrap();
    static GeneratorSpec smote(std::size_t k);
    static GeneratorSpec kde(std::optional<double> bandwidth);

    static GeneratorSpec parse(std::string_view text);
    std::string to_string() const;
};

// Interpolation record for one SMOTE draw: base index, chosen neighbor
// index, and the segment coordinate.
struct SmoteTrace {
    std::size_t i = 0;
    std::size_t m = 0;
    double lambda = 0.0;
};

// Eagerly generated batch of synthetic minority points.
struct SyntheticBatch {
    std::vector<std::vector<double>> points;
    GeneratorSpec generator;
    std::size_t source_size = 0;  // n1 of the source set

    // Generation provenance: the source index drawn for each output point,
    // and for SMOTE the full interpolation trace.
    std::vector<std::size_t> source_index;
    std::vector<SmoteTrace> smote_trace;
};

enum class JMode { Estimated, Exact };

// Number of synthetic samples to reach a balanced class ratio.
// Estimated uses empirical counts: max(0, n0 - n1).  Exact takes the true
// majority prior and returns ceil((2 pi0 - 1) n), floored at zero.
std::size_t choose_j(std::size_t n, std::size_t n0, std::size_t n1,
                     JMode mode, double pi0 = -1.0);

// j draws uniformly with replacement from the minority points.
SyntheticBatch bootstrap_sample(const std::vector<std::vector<double>>& minority,
                                std::size_t j, std::uint64_t seed);

// j SMOTE draws: pick a base point uniformly (i.i.d. with replacement),
// one of its k nearest minority neighbors uniformly (self excluded, ties by
// smallest index), and a uniform point on the connecting segment.
// Requires n1 >= k + 1 when j > 0; never silently reduces k.
SyntheticBatch smote_sample(const std::vector<std::vector<double>>& minority,
                            std::size_t k, std::size_t j, std::uint64_t seed);

// j draws from the Gaussian-kernel KDE of the minority points: a uniform
// source point plus h * N(0, I).  Without an explicit bandwidth the
// Silverman rule below is applied.
SyntheticBatch kde_sample(const std::vector<std::vector<double>>& minority,
                          std::optional<double> bandwidth, std::size_t j,
                          std::uint64_t seed);

// Silverman bandwidth generalized across dimensions:
//   h = 1.06 * sigma_hat * n1^(-1/(4+d)),
// with sigma_hat the mean of the per-coordinate sample standard deviations.
double silverman_bandwidth(const std::vector<std::vector<double>>& points);

// Dispatch on the spec's kind.
SyntheticBatch generate(const GeneratorSpec& spec,
                        const std::vector<std::vector<double>>& minority,
                        std::size_t j, std::uint64_t seed);

}  // namespace rebal
