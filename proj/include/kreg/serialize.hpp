#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "kreg/check_report.hpp"
#include "kreg/integrate.hpp"
#include "kreg/kappa_phase.hpp"
#include "kreg/ligon_schaaf.hpp"
#include "kreg/stereo.hpp"

namespace kreg {

using json = nlohmann::json;

Vec vec_from_json(const json& j, const char* what);
json vec_to_json(const Vec& v);

json to_json(const KappaParams& params);
/// Missing keys take their defaults; p0 defaults to m. A stored gamma must equal alpha - 1.
KappaParams params_from_json(const json& j, const KappaParams& base = {});

json to_json(const SphereState& s);
SphereState sphere_state_from_json(const json& j);

json to_json(const PhasePoint& pt);
/// Reads {position, momentum[, chart]}; `fallback` is used when chart is absent.
PhasePoint phase_point_from_json(const json& j, Chart fallback);

json to_json(const DelaunayState& st);
DelaunayState delaunay_state_from_json(const json& j);

json to_json(const CheckReport& r);
json to_json(const IntegratorConfig& c);
IntegratorConfig integrator_from_json(const json& j, const IntegratorConfig& base = {});

/// Full trajectory with metadata.
json to_json(const Trajectory& traj);

/// One header comment line with chart, integrator and termination, one column
/// header line, then one row per sample; values printed with %.17g.
void write_csv(std::ostream& out, const Trajectory& traj);

std::string format_double(double v);

enum class Format { Csv, Json };

struct RunConfig {
    std::string command;
    KappaParams params;
    IntegratorConfig integrator;
    double duration = 10.0;
    std::optional<std::string> output_path;
    Format format = Format::Json;
    std::uint64_t seed = 42;
};

json to_json(const RunConfig& cfg);
/// Overlays the keys present in `j` onto `base`.
RunConfig run_config_from_json(const json& j, const RunConfig& base = {});

}  // namespace kreg
