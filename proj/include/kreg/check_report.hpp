#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kreg {

/// Outcome of one numerical identity check over a set of evaluation points.
struct CheckReport {
    std::string identity_name;
    std::size_t n_points = 0;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    /// Set when a known discrepancy is surfaced instead of failed.
    std::optional<std::string> warning;
    /// Measured side quantities (e.g. the bracket factor actually observed).
    std::map<std::string, double> details;
};

/// Builds a report from per-point residuals. Non-finite residuals fail the check.
CheckReport summarize(std::string name, std::span<const double> residuals, double tolerance);

bool all_pass(std::span<const CheckReport> reports);

}  // namespace kreg
