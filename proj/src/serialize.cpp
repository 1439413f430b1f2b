#include "kreg/serialize.hpp"

#include <cmath>
#include <cstdio>

#include "kreg/error.hpp"

namespace kreg {

Vec vec_from_json(const json& j, const char* what)
{
    if (!j.is_array()) {
        fail(ErrorKind::InvalidState, std::string(what) + " must be an array of numbers");
    }
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) {
            fail(ErrorKind::InvalidState, std::string(what) + " must be an array of numbers");
        }
        v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
    }
    return v;
}

json vec_to_json(const Vec& v)
{
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out.push_back(v[k]);
    }
    return out;
}

namespace {

double number(const json& j, const char* key, double fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number()) {
        fail(ErrorKind::InvalidParams, std::string("'") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

const json& require_object(const json& j, const char* what)
{
    if (!j.is_object()) {
        fail(ErrorKind::InvalidState, std::string(what) + " must be a JSON object");
    }
    return j;
}

const json& field(const json& j, const char* key)
{
    if (!j.contains(key)) {
        fail(ErrorKind::InvalidState, std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

}  // namespace

json to_json(const KappaParams& p)
{
    return json{{"a", p.a}, {"alpha", p.alpha}, {"beta", p.beta}, {"p0", p.p0}, {"m", p.m}, {"C", p.C}};
}

KappaParams params_from_json(const json& j, const KappaParams& base)
{
    require_object(j, "params");
    KappaParams p = base;
    p.a = number(j, "a", base.a);
    p.alpha = number(j, "alpha", base.alpha);
    p.beta = number(j, "beta", base.beta);
    p.m = number(j, "m", base.m);
    p.C = number(j, "C", base.C);
    p.p0 = j.contains("p0") ? number(j, "p0", base.p0) : p.m;
    if (j.contains("gamma") && std::abs(number(j, "gamma", 0.0) - p.gamma()) > 1e-15) {
        fail(ErrorKind::InvalidParams, "gamma is derived as alpha - 1 and may not be set independently");
    }
    p.validate();
    return p;
}

json to_json(const SphereState& s) { return json{{"u", vec_to_json(s.u)}, {"v", vec_to_json(s.v)}}; }

SphereState sphere_state_from_json(const json& j)
{
    require_object(j, "sphere state");
    SphereState s{vec_from_json(field(j, "u"), "u"), vec_from_json(field(j, "v"), "v")};
    s.validate();
    return s;
}

json to_json(const PhasePoint& pt)
{
    return json{{"position", vec_to_json(pt.position())},
                {"momentum", vec_to_json(pt.momentum())},
                {"chart", std::string(to_string(pt.chart()))}};
}

PhasePoint phase_point_from_json(const json& j, Chart fallback)
{
    require_object(j, "phase point");
    const Chart chart = j.contains("chart") ? chart_from_string(j.at("chart").get<std::string>()) : fallback;
    return PhasePoint(vec_from_json(field(j, "position"), "position"), vec_from_json(field(j, "momentum"), "momentum"),
                      chart);
}

json to_json(const DelaunayState& st) { return json{{"x", vec_to_json(st.x)}, {"y", vec_to_json(st.y)}}; }

DelaunayState delaunay_state_from_json(const json& j)
{
    require_object(j, "Delaunay state");
    const Vec x = vec_from_json(field(j, "x"), "x");
    const Vec y = vec_from_json(field(j, "y"), "y");
    if (x.size() != 4 || y.size() != 4) {
        fail(ErrorKind::InvalidState, "Delaunay states need 4-vectors x and y");
    }
    return DelaunayState{x, y};
}

namespace {

// JSON has no inf/nan; non-finite residuals are written as strings.
json real(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

json to_json(const CheckReport& r)
{
    json details = json::object();
    for (const auto& [k, v] : r.details) {
        details[k] = real(v);
    }
    json out{{"identity_name", r.identity_name}, {"n_points", r.n_points}, {"max_residual", real(r.max_residual)},
             {"mean_residual", real(r.mean_residual)}, {"tolerance", r.tolerance}, {"pass", r.pass},
             {"details", details}};
    if (r.warning) {
        out["warning"] = *r.warning;
    }
    return out;
}

json to_json(const IntegratorConfig& c)
{
    return json{{"method", std::string(to_string(c.method))},
                {"step", c.step},
                {"adaptive", c.adaptive},
                {"min_step", c.min_step},
                {"projection", c.projection},
                {"tolerance", c.tolerance}};
}

IntegratorConfig integrator_from_json(const json& j, const IntegratorConfig& base)
{
    require_object(j, "integrator");
    IntegratorConfig c = base;
    if (j.contains("method")) {
        c.method = method_from_string(j.at("method").get<std::string>());
    }
    c.step = number(j, "step", c.step);
    c.min_step = number(j, "min_step", c.min_step);
    c.tolerance = number(j, "tolerance", c.tolerance);
    if (j.contains("adaptive")) {
        c.adaptive = j.at("adaptive").get<bool>();
    }
    if (j.contains("projection")) {
        c.projection = j.at("projection").get<bool>();
    }
    c.validate();
    return c;
}

json to_json(const Trajectory& traj)
{
    json samples = json::array();
    for (const Sample& s : traj.samples) {
        samples.push_back(json{{traj.param_name, s.param}, {"state", vec_to_json(s.state)},
                               {"invariants", vec_to_json(s.invariants)}});
    }
    return json{{"chart", traj.chart},
                {"param_name", traj.param_name},
                {"state_names", traj.state_names},
                {"invariant_names", traj.invariant_names},
                {"integrator", to_json(traj.config)},
                {"system_params", traj.system_params},
                {"termination", std::string(to_string(traj.termination))},
                {"termination_detail", traj.termination_detail},
                {"samples", samples}};
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const Trajectory& traj)
{
    out << "# chart=" << traj.chart << " method=" << to_string(traj.config.method)
        << " step=" << format_double(traj.config.step) << " adaptive=" << (traj.config.adaptive ? 1 : 0)
        << " termination=" << to_string(traj.termination) << '\n';
    out << traj.param_name;
    for (const auto& n : traj.state_names) {
        out << ',' << n;
    }
    for (const auto& n : traj.invariant_names) {
        out << ',' << n;
    }
    out << '\n';
    for (const Sample& s : traj.samples) {
        out << format_double(s.param);
        for (Eigen::Index k = 0; k < s.state.size(); ++k) {
            out << ',' << format_double(s.state[k]);
        }
        for (Eigen::Index k = 0; k < s.invariants.size(); ++k) {
            out << ',' << format_double(s.invariants[k]);
        }
        out << '\n';
    }
}

json to_json(const RunConfig& cfg)
{
    json out{{"command", cfg.command},
             {"params", to_json(cfg.params)},
             {"integrator", to_json(cfg.integrator)},
             {"duration", cfg.duration},
             {"format", cfg.format == Format::Csv ? "csv" : "json"},
             {"seed", cfg.seed}};
    out["out"] = cfg.output_path ? json(*cfg.output_path) : json(nullptr);
    return out;
}

RunConfig run_config_from_json(const json& j, const RunConfig& base)
{
    require_object(j, "config");
    RunConfig cfg = base;
    if (j.contains("command")) {
        cfg.command = j.at("command").get<std::string>();
    }
    if (j.contains("params")) {
        cfg.params = params_from_json(j.at("params"), cfg.params);
    }
    if (j.contains("integrator")) {
        cfg.integrator = integrator_from_json(j.at("integrator"), cfg.integrator);
    }
    cfg.duration = number(j, "duration", cfg.duration);
    if (j.contains("out") && !j.at("out").is_null()) {
        cfg.output_path = j.at("out").get<std::string>();
    }
    if (j.contains("format")) {
        const auto f = j.at("format").get<std::string>();
        if (f != "csv" && f != "json") {
            fail(ErrorKind::Usage, "format must be csv or json");
        }
        cfg.format = f == "csv" ? Format::Csv : Format::Json;
    }
    if (j.contains("seed")) {
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    return cfg;
}

}  // namespace kreg
