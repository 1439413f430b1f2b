#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kreg/batch.hpp"
#include "kreg/check_report.hpp"
#include "kreg/kappa_phase.hpp"

namespace kreg {

struct SuiteOptions {
    KappaParams params;
    std::uint64_t seed = 42;
    double step = 1e-3;
    double duration = 10.0;
    batch::Exec exec = batch::default_exec();
};

/// brackets, stereo, moser, so4, ls, all.
const std::vector<std::string>& suite_names();

/// Runs one verification battery. Throws Usage for an unknown name.
std::vector<CheckReport> run_suite(std::string_view name, const SuiteOptions& options);

}  // namespace kreg
