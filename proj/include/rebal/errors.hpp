#pragma once

#include <stdexcept>
#include <string>

namespace rebal {

// Invalid user-supplied configuration: malformed specs, bad CLI arguments,
// unparseable config files.  CLI maps this to exit code 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A closed-form quantity was requested outside its stated domain
// (e.g. the 1-D type-II error formulas with mu1 <= mu0).
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A generator was asked to produce samples from a source that cannot
// support the request (empty minority set, SMOTE with n1 <= k).
struct insufficient_data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ERM received effectively single-class data: the unregularized minimum
// is at infinity, so no finite model exists.
struct degenerate_separation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Empirical class priors were requested but one class is absent.
struct degenerate_prior_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// chi2_discrete requires the first argument to be absolutely continuous
// with respect to the reference distribution.
struct absolute_continuity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The population-minimizer formula was evaluated at a point where its
// denominator is not positive; surfaced rather than clamped.
struct formula_domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rebal
