// kreg: verification suites, simulations and point transforms for the
// kappa-deformed Kepler problem and its Moser / Ligon-Schaaf regularizations.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kreg/error.hpp"
#include "kreg/kepler.hpp"
#include "kreg/ligon_schaaf.hpp"
#include "kreg/moser.hpp"
#include "kreg/serialize.hpp"
#include "kreg/stereo.hpp"
#include "kreg/suites.hpp"

using namespace kreg;

namespace {

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2, kIO = 3 };

struct Flags {
    std::optional<double> a, alpha, beta, p0, m, C, step, duration;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format, out, config;

    std::string suite = "all";
    std::string system = "kepler";
    std::string transform;
    std::optional<std::string> point, state, method;
    std::vector<double> q, p;
    bool adaptive = false;
    bool fixed = false;
    bool serial = false;
};

std::string slurp(std::istream& in) { return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}; }

json parse_json(const std::string& text, const char* what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Usage, std::string("invalid JSON in ") + what + ": " + e.what());
    }
}

RunConfig effective_config(const Flags& f, std::string command)
{
    RunConfig cfg;
    cfg.command = std::move(command);
    if (f.config) {
        std::ifstream in(*f.config);
        if (!in) {
            fail(ErrorKind::IOError, "cannot read config file '" + *f.config + "'");
        }
        cfg = run_config_from_json(parse_json(slurp(in), "config file"), cfg);
        cfg.command = std::move(command);
    }
    KappaParams& p = cfg.params;
    const bool mass_given = f.m.has_value();
    p.a = f.a.value_or(p.a);
    p.alpha = f.alpha.value_or(p.alpha);
    p.beta = f.beta.value_or(p.beta);
    p.m = f.m.value_or(p.m);
    p.C = f.C.value_or(p.C);
    if (f.p0) {
        p.p0 = *f.p0;
    } else if (mass_given) {
        p.p0 = p.m;
    }
    p.validate();
    if (f.step) {
        cfg.integrator.step = *f.step;
        cfg.integrator.min_step = std::min(cfg.integrator.min_step, 0.5 * *f.step);
    }
    cfg.duration = f.duration.value_or(cfg.duration);
    if (f.seed) {
        cfg.seed = *f.seed;
    }
    if (f.out) {
        cfg.output_path = *f.out;
    }
    if (f.format) {
        cfg.format = *f.format == "csv" ? Format::Csv : Format::Json;
    }
    if (f.method) {
        cfg.integrator.method = method_from_string(*f.method);
    }
    cfg.integrator.validate();
    if (!(cfg.duration >= 0.0)) {
        fail(ErrorKind::InvalidParams, "duration must be non-negative");
    }
    return cfg;
}

void emit(const RunConfig& cfg, const std::string& text)
{
    if (!cfg.output_path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*cfg.output_path);
    if (!out) {
        fail(ErrorKind::IOError, "cannot write '" + *cfg.output_path + "'");
    }
    out << text;
    if (!out) {
        fail(ErrorKind::IOError, "write to '" + *cfg.output_path + "' failed");
    }
}

json read_input(const std::optional<std::string>& inline_json, const char* what)
{
    if (inline_json) {
        return parse_json(*inline_json, what);
    }
    return parse_json(slurp(std::cin), what);
}

std::optional<std::pair<Vec, Vec>> kepler_flags(const Flags& f)
{
    if (f.q.empty() && f.p.empty()) {
        return std::nullopt;
    }
    if (f.q.size() != f.p.size() || (f.q.size() != 2 && f.q.size() != 3)) {
        fail(ErrorKind::InvalidState, "--q and --p need matching dimension 2 or 3");
    }
    return std::pair{Eigen::Map<const Vec>(f.q.data(), static_cast<Eigen::Index>(f.q.size())),
                     Eigen::Map<const Vec>(f.p.data(), static_cast<Eigen::Index>(f.p.size()))};
}

std::vector<std::string> names(const char* prefix, Eigen::Index n)
{
    std::vector<std::string> out;
    for (Eigen::Index k = 1; k <= n; ++k) {
        out.push_back(prefix + std::to_string(k));
    }
    return out;
}

std::string render(const RunConfig& cfg, const Trajectory& traj)
{
    if (cfg.format == Format::Csv) {
        std::ostringstream out;
        write_csv(out, traj);
        return out.str();
    }
    json j = to_json(traj);
    j["config"] = to_json(cfg);
    return j.dump(2) + "\n";
}

int cmd_verify(const Flags& f)
{
    const RunConfig cfg = effective_config(f, "verify");
    SuiteOptions opts;
    opts.params = cfg.params;
    opts.seed = cfg.seed;
    opts.step = cfg.integrator.step;
    opts.duration = cfg.duration;
    opts.exec = f.serial ? batch::Exec::Serial : batch::default_exec();
    const std::vector<CheckReport> reports = run_suite(f.suite, opts);

    const json config = to_json(cfg);
    json out = json::array();
    for (const auto& r : reports) {
        json j = to_json(r);
        j["suite"] = f.suite;
        j["config"] = config;
        out.push_back(std::move(j));
        std::fprintf(stderr, "%-4s %s (max %.3g, tol %.3g)%s\n", r.pass ? (r.warning ? "WARN" : "ok") : "FAIL",
                     r.identity_name.c_str(), r.max_residual, r.tolerance, r.warning ? " [warning]" : "");
    }
    emit(cfg, out.dump(2) + "\n");
    return all_pass(reports) ? kOk : kCheckFailed;
}

int cmd_simulate(const Flags& f)
{
    RunConfig cfg = effective_config(f, "simulate");
    if (!f.format) {
        cfg.format = Format::Csv;
    }
    IntegratorConfig ic = cfg.integrator;
    Trajectory traj;
    if (f.system == "kepler") {
        const KeplerSystem sys = KeplerSystem::from_params(cfg.params);
        auto qp = kepler_flags(f);
        if (!qp) {
            const PhasePoint pt = phase_point_from_json(read_input(f.state, "state"), Chart::Kepler);
            qp = std::pair{pt.position(), pt.momentum()};
        }
        const Eigen::Index d = qp->first.size();
        if (!f.method) {
            ic.method = Method::StormerVerlet;
        }
        ic.adaptive = !f.fixed;
        traj = integrate(kepler_ode(sys, d), concat(qp->first, qp->second), cfg.duration, ic);
        traj.chart = "kepler";
        traj.state_names = names("q", d);
        for (auto& n : names("p", d)) {
            traj.state_names.push_back(n);
        }
        traj.system_params = {{"mu_tilde", sys.mu_tilde}, {"c_tilde", sys.c_tilde}};
    } else if (f.system == "sphere") {
        const SphereState s = sphere_state_from_json(read_input(f.state, "state"));
        if (!f.method) {
            ic.method = Method::ImplicitMidpoint;
        }
        ic.projection = true;
        ic.adaptive = f.adaptive;
        traj = integrate(sphere_ode(s.dim()), flat(s), cfg.duration, ic);
        traj.chart = "sphere";
        traj.state_names = names("u", s.u.size());
        for (auto& n : names("v", s.v.size())) {
            traj.state_names.push_back(n);
        }
    } else if (f.system == "delaunay") {
        const KeplerSystem sys = KeplerSystem::from_params(cfg.params);
        const DelaunayState st = delaunay_state_from_json(read_input(f.state, "state"));
        st.validate(1e-8);
        if (!f.method) {
            ic.method = Method::RK4;
        }
        ic.adaptive = f.adaptive;
        const double mu = delaunay_mass(sys);
        traj = integrate(delaunay_ode(mu), st.flat(), cfg.duration, ic);
        traj.chart = "delaunay";
        traj.state_names = names("x", 4);
        for (auto& n : names("y", 4)) {
            traj.state_names.push_back(n);
        }
        traj.system_params = {{"delaunay_mass", mu}};
    } else {
        fail(ErrorKind::Usage, "unknown system '" + f.system + "' (kepler, sphere, delaunay)");
    }
    const json params = to_json(cfg.params);
    for (auto it = params.begin(); it != params.end(); ++it) {
        traj.system_params[it.key()] = it.value().get<double>();
    }
    cfg.integrator = ic;
    emit(cfg, render(cfg, traj));
    return kOk;
}

int cmd_pipeline(const Flags& f)
{
    RunConfig cfg = effective_config(f, "pipeline");
    if (!f.format) {
        cfg.format = Format::Csv;
    }
    SphereState s0;
    if (auto qp = kepler_flags(f)) {
        s0 = sphere_state_for_kepler(qp->first, qp->second, cfg.params);
    } else if (f.state) {
        const json j = parse_json(*f.state, "state");
        if (j.contains("u")) {
            s0 = sphere_state_from_json(j);
        } else {
            const PhasePoint pt = phase_point_from_json(j, Chart::Kepler);
            s0 = sphere_state_for_kepler(pt.position(), pt.momentum(), cfg.params);
        }
    } else {
        // Radial fall from |q| = 2: the collision orbit on H = -1/2.
        Vec q(3);
        q << 2.0, 0.0, 0.0;
        s0 = sphere_state_for_kepler(q, Vec::Zero(3), cfg.params);
    }
    PipelineConfig pc;
    pc.duration = cfg.duration;
    pc.step = cfg.integrator.step;
    Trajectory traj = moser_pipeline(s0, cfg.params, pc);
    // The swapped chart runs the Kepler flow backwards; export forward time.
    const Eigen::Index d = s0.dim();
    for (Sample& s : traj.samples) {
        s.state.tail(d) = -s.state.tail(d);
    }
    cfg.integrator = traj.config;
    emit(cfg, render(cfg, traj));
    return kOk;
}

json frame_json(const LSFrame& fr)
{
    return json{{"A", vec_to_json(fr.A)}, {"B", vec_to_json(fr.B)}, {"nu", fr.nu}, {"scale", fr.scale},
                {"theta", fr.theta}};
}

Vec3 as3(const Vec& v, const char* what)
{
    if (v.size() != 3) {
        fail(ErrorKind::InvalidState, std::string(what) + " must have 3 components");
    }
    return v;
}

int cmd_map(const Flags& f)
{
    const RunConfig cfg = effective_config(f, "map");
    const KappaParams& params = cfg.params;
    const json in = read_input(f.point, "point");
    const std::string& t = f.transform;
    json out;
    if (t == "realize") {
        out = to_json(realize_spatial(phase_point_from_json(in, Chart::Commutative), params));
    } else if (t == "unrealize") {
        out = to_json(unrealize_spatial(phase_point_from_json(in, Chart::KappaRealized), params));
    } else if (t == "stereo-fwd") {
        out = to_json(stereo_forward(sphere_state_from_json(in)));
    } else if (t == "stereo-inv") {
        out = to_json(stereo_inverse(phase_point_from_json(in, Chart::Commutative)));
    } else if (t == "kappa-stereo-fwd") {
        out = to_json(kappa_stereo_forward(sphere_state_from_json(in), params));
    } else if (t == "kappa-stereo-inv") {
        out = to_json(kappa_stereo_inverse(phase_point_from_json(in, Chart::KappaRealized)));
    } else if (t == "role-swap") {
        out = to_json(role_swap(phase_point_from_json(in, Chart::KappaRealized)));
    } else if (t == "ls-forward") {
        const PhasePoint pt = phase_point_from_json(in, Chart::Kepler).require(Chart::Kepler);
        const KeplerSystem sys = KeplerSystem::from_params(params);
        const auto [st, fr] = ls_forward(as3(pt.position(), "position"), as3(pt.momentum(), "momentum"), sys);
        out = to_json(st);
        out["frame"] = frame_json(fr);
    } else if (t == "ls-inverse") {
        const KeplerSystem sys = KeplerSystem::from_params(params);
        const auto [q, p] = ls_inverse(delaunay_state_from_json(in), sys);
        out = to_json(PhasePoint(q, p, Chart::Kepler));
    } else {
        fail(ErrorKind::Usage, "unknown transform '" + t + "'");
    }
    emit(cfg, out.dump(2) + "\n");
    return kOk;
}

int exit_code_for(ErrorKind kind) { return kind == ErrorKind::IOError ? kIO : kUsage; }

void report_error(const std::string& kind, const std::string& message)
{
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"kappa-deformed Kepler problem: regularization maps, simulations and identity checks"};
    app.require_subcommand(1);
    Flags f;

    app.add_option("--a", f.a, "deformation parameter a >= 0");
    app.add_option("--alpha", f.alpha, "realization constant alpha (gamma = alpha - 1)");
    app.add_option("--beta", f.beta, "realization constant beta");
    app.add_option("--p0", f.p0, "reference time-component momentum (default: m)");
    app.add_option("--m", f.m, "particle mass");
    app.add_option("--C", f.C, "Kepler coupling");
    app.add_option("--seed", f.seed, "sampling seed (default 42)");
    app.add_option("--step", f.step, "integrator step");
    app.add_option("--duration", f.duration, "integration duration");
    app.add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", f.out, "output path (default: standard output)");
    app.add_option("--config", f.config, "JSON run configuration; flags take precedence");

    auto* verify = app.add_subcommand("verify", "run identity-check batteries");
    verify->add_option("--suite", f.suite, "battery to run")->check(CLI::IsMember(suite_names()));
    verify->add_flag("--serial", f.serial, "evaluate point batteries serially");

    auto* simulate = app.add_subcommand("simulate", "integrate one system and export the trajectory");
    simulate->add_option("--system", f.system, "system")->check(CLI::IsMember({"kepler", "sphere", "delaunay"}));
    simulate->add_option("--q", f.q, "Kepler position");
    simulate->add_option("--p", f.p, "Kepler momentum");
    simulate->add_option("--state", f.state, "initial state as JSON (default: standard input)");
    simulate->add_option("--method", f.method, "verlet, midpoint or rk4");
    simulate->add_flag("--adaptive", f.adaptive, "adaptive steps for sphere and delaunay runs");
    simulate->add_flag("--fixed", f.fixed, "fixed steps for kepler runs");

    auto* map = app.add_subcommand("map", "apply one transform to a JSON point");
    map->add_option("--transform", f.transform, "transform")
        ->required()
        ->check(CLI::IsMember({"realize", "unrealize", "stereo-fwd", "stereo-inv", "kappa-stereo-fwd",
                               "kappa-stereo-inv", "role-swap", "ls-forward", "ls-inverse"}));
    map->add_option("--point", f.point, "input point as JSON (default: standard input)");

    auto* pipeline = app.add_subcommand("pipeline", "Moser chain from a sphere geodesic to the Kepler chart");
    pipeline->add_option("--q", f.q, "Kepler position on H = -1/2");
    pipeline->add_option("--p", f.p, "Kepler momentum on H = -1/2");
    pipeline->add_option("--state", f.state, "sphere state {u, v} or Kepler point as JSON");

    for (auto* sub : {verify, simulate, map, pipeline}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        report_error("Usage", e.what());
        return kUsage;
    }

    try {
        if (verify->parsed()) {
            return cmd_verify(f);
        }
        if (simulate->parsed()) {
            return cmd_simulate(f);
        }
        if (map->parsed()) {
            return cmd_map(f);
        }
        return cmd_pipeline(f);
    } catch (const Error& e) {
        report_error(std::string(to_string(e.kind())), e.what());
        return exit_code_for(e.kind());
    } catch (const json::exception& e) {
        report_error("Usage", e.what());
        return kUsage;
    }
}
