#pragma once

// Batch property suites over the statistical machinery, reported as rows a
// CLI can print and an acceptance harness can gate on.  Every row follows
// the same convention: the check passes iff value <= threshold; the note
// explains what was measured.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rebal {

enum class DiagSuite {
    Formulas,     // closed-form type-II error vs Monte Carlo
    Coupling,     // maximal-coupling mismatch rate vs TV; marginal fit
    Geometry,     // nearest-neighbor in-degree bounds and r_k scaling
    PluginBound,  // plug-in identity and its estimation-error bound
};

struct DiagRow {
    std::string check;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;  // value <= threshold
    std::string note;
};

// "formulas" | "coupling" | "geometry" | "plugin-bound".
DiagSuite parse_suite(std::string_view name);
std::string suite_name(DiagSuite suite);

// Runs every check in the suite; deterministic given the seed.
std::vector<DiagRow> run_diagnostics(DiagSuite suite, std::uint64_t seed);

bool all_pass(const std::vector<DiagRow>& rows);

// Header: suite,check,value,threshold,pass,note
void write_diag_csv(std::ostream& out, DiagSuite suite,
                    const std::vector<DiagRow>& rows);

}  // namespace rebal
