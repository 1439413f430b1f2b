#include "kreg/moser.hpp"

#include <cmath>
#include <limits>

#include "kreg/error.hpp"
#include "kreg/kepler.hpp"
#include "kreg/numdiff.hpp"
#include "kreg/sampling.hpp"

namespace kreg {

double sphere_hamiltonian(const SphereState& s) { return 0.5 * s.u.squaredNorm() * s.v.squaredNorm(); }

std::pair<Vec, Vec> geodesic_rhs(const SphereState& s) { return {s.v, -s.v.squaredNorm() * s.u}; }

SphereState sphere_from_flat(const Vec& state)
{
    const Eigen::Index n = state.size() / 2;
    return SphereState{state.head(n), state.tail(n)};
}

Vec flat(const SphereState& s) { return concat(s.u, s.v); }

void project_sphere(Vec& state)
{
    const Eigen::Index n = state.size() / 2;
    const double norm = state.head(n).norm();
    if (!(norm > 0.0)) {
        fail(ErrorKind::InvalidState, "cannot project u = 0 onto the sphere");
    }
    state.head(n) /= norm;
    const Vec u = state.head(n);
    state.tail(n) -= u.dot(state.tail(n)) * u;
}

OdeSystem sphere_ode(Eigen::Index d)
{
    const Eigen::Index n = d + 1;
    OdeSystem ode;
    ode.rhs = [n](const Vec& y) {
        auto [du, dv] = geodesic_rhs(SphereState{y.head(n), y.tail(n)});
        return concat(du, dv);
    };
    ode.project = project_sphere;
    ode.monitor = [n](const Vec& y) { return sphere_hamiltonian(SphereState{y.head(n), y.tail(n)}); };
    ode.invariant_names = {"F", "norm_u_minus_1", "u_dot_v"};
    ode.invariants = [n](const Vec& y) {
        const SphereState s{y.head(n), y.tail(n)};
        Vec out(3);
        out << sphere_hamiltonian(s), s.u.norm() - 1.0, s.u.dot(s.v);
        return out;
    };
    return ode;
}

namespace {

const PhasePoint& require_flat_chart(const PhasePoint& pt)
{
    if (pt.chart() != Chart::KappaRealized && pt.chart() != Chart::Commutative) {
        fail(ErrorKind::ChartMismatch, std::string("expected a realized or commutative point, got ") +
                                           std::string(to_string(pt.chart())));
    }
    return pt;
}

double momentum_norm_checked(const PhasePoint& pt)
{
    const double r = pt.momentum().norm();
    if (!(r >= kMomentumGuard)) {
        fail(ErrorKind::MomentumCollision, "|phi| < 1e-12: Kepler collision in the swapped chart");
    }
    return r;
}

}  // namespace

double pulled_back_F(const PhasePoint& pt)
{
    require_flat_chart(pt);
    const double w = pt.position().squaredNorm() + 1.0;
    return w * w * pt.momentum().squaredNorm() / 8.0;
}

double g_hamiltonian(const PhasePoint& pt)
{
    require_flat_chart(pt);
    return 0.5 * (pt.position().squaredNorm() + 1.0) * pt.momentum().norm() - 1.0;
}

double moser_kepler_hamiltonian(const PhasePoint& pt)
{
    require_flat_chart(pt);
    return 0.5 * pt.position().squaredNorm() - 1.0 / momentum_norm_checked(pt);
}

Vec pulled_back_F_gradient(const PhasePoint& pt)
{
    require_flat_chart(pt);
    const Vec& psi = pt.position();
    const Vec& phi = pt.momentum();
    const double w = psi.squaredNorm() + 1.0;
    return concat(0.5 * w * phi.squaredNorm() * psi, 0.25 * w * w * phi);
}

Vec g_hamiltonian_gradient(const PhasePoint& pt)
{
    require_flat_chart(pt);
    const Vec& psi = pt.position();
    const Vec& phi = pt.momentum();
    const double r = momentum_norm_checked(pt);
    return concat(r * psi, 0.5 * (psi.squaredNorm() + 1.0) * phi / r);
}

Vec moser_kepler_hamiltonian_gradient(const PhasePoint& pt)
{
    require_flat_chart(pt);
    const double r = momentum_norm_checked(pt);
    return concat(pt.position(), pt.momentum() / (r * r * r));
}

PhasePoint role_swap(const PhasePoint& pt)
{
    switch (pt.chart()) {
    case Chart::KappaRealized: return PhasePoint(pt.momentum(), pt.position(), Chart::Kepler);
    case Chart::Kepler: return PhasePoint(pt.momentum(), pt.position(), Chart::KappaRealized);
    default: break;
    }
    fail(ErrorKind::ChartMismatch, "role_swap needs a realized or Kepler point");
}

namespace {

// Integral over [lo, hi] of the quadratic through (x[k], f[k]), k = 0..2.
double quadratic_integral(const double* x, const double* f, double lo, double hi)
{
    const double c = x[1];
    const double h0 = x[0] - c;
    const double h2 = x[2] - c;
    // f(c + t) = f1 + b t + a t^2
    const double d0 = (f[0] - f[1]) / h0;
    const double d2 = (f[2] - f[1]) / h2;
    const double a = (d2 - d0) / (h2 - h0);
    const double b = d0 - a * h0;
    auto prim = [&](double t) { return f[1] * t + 0.5 * b * t * t + a * t * t * t / 3.0; };
    return prim(hi - c) - prim(lo - c);
}

}  // namespace

std::vector<double> cumulative_integral(std::span<const double> params, std::span<const double> values,
                                        Quadrature rule)
{
    if (params.size() != values.size()) {
        fail(ErrorKind::InvalidParams, "cumulative_integral needs matching parameter and value lists");
    }
    const std::size_t n = params.size();
    std::vector<double> out(n, 0.0);
    if (n < 3 || rule == Quadrature::Trapezoid) {
        for (std::size_t i = 1; i < n; ++i) {
            out[i] = out[i - 1] + 0.5 * (params[i] - params[i - 1]) * (values[i] + values[i - 1]);
        }
        return out;
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (i % 2 == 0) {
            out[i] = out[i - 2] + quadratic_integral(&params[i - 2], &values[i - 2], params[i - 2], params[i]);
        } else {
            const std::size_t base = (i + 1 < n) ? i - 1 : i - 2;
            out[i] = out[i - 1] + quadratic_integral(&params[base], &values[base], params[i - 1], params[i]);
        }
    }
    return out;
}

Trajectory reparametrize(const Trajectory& traj, const std::function<double(const Vec&)>& factor, Quadrature rule)
{
    std::vector<double> params;
    std::vector<double> values;
    params.reserve(traj.samples.size());
    values.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        const double f = factor(s.state);
        if (!(f >= 1e-12)) {
            fail(ErrorKind::DegenerateParametrization, "reparametrization factor vanishes at param " +
                                                           std::to_string(s.param));
        }
        params.push_back(s.param);
        values.push_back(f);
    }
    const std::vector<double> t = cumulative_integral(params, values, rule);

    Trajectory out = traj;
    out.param_name = "t_a";
    out.invariant_names.push_back(traj.param_name == "t" ? "s" : traj.param_name);
    for (std::size_t k = 0; k < out.samples.size(); ++k) {
        Sample& s = out.samples[k];
        const Eigen::Index m = s.invariants.size();
        s.invariants.conservativeResize(m + 1);
        s.invariants[m] = s.param;
        s.param = t[k];
    }
    return out;
}

MoserChain moser_chain(const SphereState& s, const KappaParams& params, double s_param, double t_a)
{
    PhasePoint pulled = kappa_stereo_forward(s, params);
    PhasePoint kepler = role_swap(pulled);
    return MoserChain{s, std::move(pulled), std::move(kepler), s_param, t_a};
}

Trajectory moser_pipeline(const SphereState& s0, const KappaParams& params, const PipelineConfig& config)
{
    params.validate();
    s0.validate();
    if (std::abs(sphere_hamiltonian(s0) - 0.5) > 1e-10) {
        fail(ErrorKind::InvalidState, "Moser pipeline starts on F = 1/2");
    }
    const Eigen::Index d = s0.dim();
    IntegratorConfig cfg;
    cfg.method = Method::ImplicitMidpoint;
    cfg.step = config.step;
    cfg.min_step = std::min(cfg.min_step, 0.5 * config.step);
    cfg.projection = true;
    const Trajectory sphere = integrate(sphere_ode(d), flat(s0), config.duration, cfg);

    const Eigen::Index n = d + 1;
    // |phi| = (1 - u_n) |v| on the projected chart image.
    const auto speed = [n, &params](const Vec& y) {
        return kappa_stereo_forward(SphereState{y.head(n), y.tail(n)}, params).momentum().norm();
    };
    Trajectory out = reparametrize(sphere, speed, config.quadrature);

    out.chart = std::string(to_string(Chart::Kepler));
    out.state_names.clear();
    for (Eigen::Index i = 1; i <= d; ++i) {
        out.state_names.push_back("q" + std::to_string(i));
    }
    for (Eigen::Index i = 1; i <= d; ++i) {
        out.state_names.push_back("p" + std::to_string(i));
    }
    out.invariant_names = {"s", "H", "F", "norm_u_minus_1", "u_dot_v"};
    for (Sample& sample : out.samples) {
        const SphereState s{sample.state.head(n), sample.state.tail(n)};
        const MoserChain chain = moser_chain(s, params, sample.invariants[3], sample.param);
        const PhasePoint& kp = chain.kepler_point;
        Vec inv(5);
        inv << chain.s_param, moser_kepler_hamiltonian(chain.pulled_point), sphere_hamiltonian(s), s.u.norm() - 1.0,
            s.u.dot(s.v);
        sample.state = kp.flat();
        sample.invariants = std::move(inv);
    }
    out.system_params = {{"a", params.a},   {"alpha", params.alpha}, {"beta", params.beta},
                         {"p0", params.p0}, {"m", params.m},         {"C", params.C}};
    return out;
}

CheckReport moser_flow_check(const Trajectory& pipeline, double tolerance, double min_radius, double reference_step)
{
    if (pipeline.samples.empty()) {
        fail(ErrorKind::InvalidState, "empty pipeline trajectory");
    }
    const Eigen::Index d = pipeline.samples.front().state.size() / 2;
    const OdeSystem kepler = kepler_ode(KeplerSystem::unit(), d);
    auto reversed = [d](const Vec& y) {
        Vec r = y;
        r.tail(d) = -r.tail(d);
        return r;
    };

    Vec ref = reversed(pipeline.samples.front().state);
    double t_prev = pipeline.samples.front().param;
    std::vector<double> residuals;
    double compared_until = t_prev;
    bool interrupted = false;
    for (const Sample& s : pipeline.samples) {
        try {
            ref = propagate(kepler, ref, s.param - t_prev, reference_step, Method::RK4);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Collision) {
                throw;
            }
            interrupted = true;
            break;
        }
        t_prev = s.param;
        if (!ref.allFinite()) {
            interrupted = true;
            break;
        }
        compared_until = s.param;
        if (s.state.head(d).norm() <= min_radius) {
            continue;
        }
        residuals.push_back((reversed(s.state) - ref).cwiseAbs().maxCoeff());
    }
    CheckReport r = summarize("Moser chain vs direct Kepler flow", residuals, tolerance);
    r.details["compared_until_t_a"] = compared_until;
    r.details["reference_interrupted"] = interrupted ? 1.0 : 0.0;
    r.details["min_radius"] = min_radius;
    return r;
}

SphereState sphere_state_for_kepler(const Vec& q, const Vec& p, const KappaParams& params)
{
    params.validate();
    const double energy = kepler_hamiltonian(q, p, KeplerSystem::unit());
    if (std::abs(energy + 0.5) > 1e-10) {
        fail(ErrorKind::InvalidState, "the Moser correspondence lives on H = -1/2");
    }
    return kappa_stereo_inverse(PhasePoint(-p, q, Chart::KappaRealized));
}

namespace {

constexpr Eigen::Index kDim = 3;

std::vector<double> column(const std::vector<double>& rows, std::size_t width, std::size_t c)
{
    std::vector<double> out(rows.size() / width);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = rows[width * k + c];
    }
    return out;
}

void tag(std::vector<CheckReport>& reports, const KappaParams& params)
{
    for (auto& r : reports) {
        r.details["a"] = params.a;
        r.details["alpha"] = params.alpha;
    }
}

double gradient_gap(double (*f)(const PhasePoint&), Vec (*grad)(const PhasePoint&), const PhasePoint& pt)
{
    const Chart chart = pt.chart();
    const Vec fd = gradient([&](const Vec& z) { return f(PhasePoint::from_flat(z, chart)); }, pt.flat());
    return (fd - grad(pt)).cwiseAbs().maxCoeff() / std::max(1.0, grad(pt).cwiseAbs().maxCoeff());
}

}  // namespace

std::vector<CheckReport> moser_identity_audit(const KappaParams& params, std::size_t n_points, std::uint64_t seed,
                                              batch::Exec exec)
{
    params.validate();
    if (n_points == 0) {
        fail(ErrorKind::InvalidParams, "moser_identity_audit needs at least one point");
    }
    Rng rng(seed);
    std::vector<SphereState> sphere_pts;
    std::vector<SphereState> level_pts;
    std::vector<Vec> flat_pts;
    for (std::size_t k = 0; k < n_points; ++k) {
        sphere_pts.push_back(random_sphere_state(rng, kDim));
    }
    for (std::size_t k = 0; k < n_points; ++k) {
        level_pts.push_back(random_sphere_state(rng, kDim, 0.9, 1.0));
    }
    for (std::size_t k = 0; k < n_points; ++k) {
        flat_pts.push_back(random_phase_vector(rng, kDim));
    }
    const KeplerSystem unit = KeplerSystem::unit();

    constexpr std::size_t width = 7;
    const auto rows = batch::evaluate_rows(
        n_points, width,
        [&](std::size_t k, double* row) {
            const SphereState& s = sphere_pts[k];
            row[0] = std::abs(pulled_back_F(kappa_stereo_forward(s, params)) - sphere_hamiltonian(s));

            const PhasePoint pt = PhasePoint::from_flat(flat_pts[k], Chart::KappaRealized);
            row[1] = gradient_gap(pulled_back_F, pulled_back_F_gradient, pt);
            row[2] = gradient_gap(g_hamiltonian, g_hamiltonian_gradient, pt);
            row[3] = gradient_gap(moser_kepler_hamiltonian, moser_kepler_hamiltonian_gradient, pt);

            const PhasePoint level = kappa_stereo_forward(level_pts[k], params);
            const ScalarField F = [](const Vec& z) { return pulled_back_F(PhasePoint::from_flat(z, Chart::KappaRealized)); };
            const ScalarField G = [](const Vec& z) { return g_hamiltonian(PhasePoint::from_flat(z, Chart::KappaRealized)); };
            const Vec gF = gradient(F, level.flat());
            const Vec gG = gradient(G, level.flat());
            row[4] = (gG - gF).cwiseAbs().maxCoeff() / std::max(1.0, gF.cwiseAbs().maxCoeff());
            row[5] = std::abs(moser_kepler_hamiltonian(level) + 0.5);

            const PhasePoint swapped = role_swap(pt);
            row[6] = std::abs(kepler_hamiltonian(swapped.position(), swapped.momentum(), unit) -
                              moser_kepler_hamiltonian(pt));
        },
        exec);
    struct Spec {
        const char* name;
        double tol;
    };
    const Spec specs[width] = {
        {"pulled_back_F o kappa_stereo_forward = sphere F", 1e-10},
        {"grad F analytic vs finite difference (relative)", 1e-6},
        {"grad G analytic vs finite difference (relative)", 1e-6},
        {"grad H analytic vs finite difference (relative)", 1e-6},
        {"grad G = grad F on F = 1/2 (relative)", 1e-6},
        {"H = -1/2 on F = 1/2", 1e-10},
        {"H o role_swap = moser_kepler_hamiltonian", 1e-12},
    };
    std::vector<CheckReport> out;
    for (std::size_t c = 0; c < width; ++c) {
        out.push_back(summarize(specs[c].name, column(rows, width, c), specs[c].tol));
    }
    tag(out, params);
    return out;
}

std::pair<Vec, Vec> moser_reference_orbit()
{
    const double tilt = 0.3;
    Vec q(3);
    Vec p(3);
    q << 0.4, 0.0, 0.0;
    p << 0.0, 2.0 * std::cos(tilt), 2.0 * std::sin(tilt);
    return {q, p};
}

std::vector<CheckReport> moser_pipeline_audit(const KappaParams& params, const PipelineConfig& config)
{
    const auto [q, p] = moser_reference_orbit();
    const Trajectory traj = moser_pipeline(sphere_state_for_kepler(q, p, params), params, config);
    std::vector<double> energy;
    std::vector<double> constraint;
    for (const Sample& s : traj.samples) {
        energy.push_back(std::abs(s.invariants[1] + 0.5));
        constraint.push_back(std::max(std::abs(s.invariants[3]), std::abs(s.invariants[4])));
    }
    std::vector<CheckReport> out;
    out.push_back(summarize("Moser pipeline |H + 1/2|", energy, 1e-7));
    out.push_back(summarize("Moser pipeline sphere constraints max(||u| - 1|, |<u,v>|)", constraint, 1e-8));
    out.push_back(moser_flow_check(traj));
    for (auto& r : out) {
        r.details["duration"] = config.duration;
        r.details["step"] = config.step;
        r.details["final_s"] = traj.samples.back().invariants[0];
    }
    tag(out, params);
    return out;
}

std::vector<CheckReport> regularization_demo(const KappaParams& params, const PipelineConfig& config)
{
    Vec q(3);
    Vec p(3);
    q << 2.0, 0.0, 0.0;
    p << 0.0, 0.0, 0.0;

    IntegratorConfig direct_cfg;
    direct_cfg.method = Method::StormerVerlet;
    direct_cfg.step = config.step;
    direct_cfg.adaptive = true;
    direct_cfg.tolerance = 1e-8;
    const Trajectory direct = integrate(kepler_ode(KeplerSystem::unit()), concat(q, p), config.duration, direct_cfg);
    const bool stopped = direct.termination == Termination::Collision ||
                         direct.termination == Termination::MinStepReached;
    const double stopped_flag = stopped ? 0.0 : 1.0;
    CheckReport direct_report =
        summarize("direct Kepler integration stops at the collision", std::span<const double>(&stopped_flag, 1), 0.5);
    direct_report.details["termination_time"] = direct.final_param();
    direct_report.details["final_radius"] = direct.samples.back().state.head(3).norm();

    const Trajectory regular = moser_pipeline(sphere_state_for_kepler(q, p, params), params, config);
    const double final_s = regular.samples.back().invariants[0];
    const double shortfall = std::abs(config.duration - final_s);
    CheckReport complete = summarize("sphere-side pipeline completes the duration", std::span<const double>(&shortfall, 1),
                                     1e-12);
    complete.details["final_s"] = final_s;
    complete.details["final_t_a"] = regular.final_param();
    complete.details["termination_is_completed"] = regular.termination == Termination::Completed ? 1.0 : 0.0;
    double closest = std::numeric_limits<double>::infinity();
    for (const Sample& s : regular.samples) {
        closest = std::min(closest, s.state.head(3).norm());
    }
    complete.details["min_kepler_radius"] = closest;

    std::vector<double> f_drift;
    std::vector<double> norm_drift;
    std::vector<double> tangency;
    const double f0 = regular.samples.front().invariants[2];
    for (const Sample& s : regular.samples) {
        f_drift.push_back(std::abs(s.invariants[2] - f0));
        norm_drift.push_back(std::abs(s.invariants[3]));
        tangency.push_back(std::abs(s.invariants[4]));
    }
    std::vector<CheckReport> out{direct_report, complete};
    out.push_back(summarize("regularized run: drift of F", f_drift, 1e-8));
    out.push_back(summarize("regularized run: ||u| - 1|", norm_drift, 1e-8));
    out.push_back(summarize("regularized run: |<u,v>|", tangency, 1e-8));
    tag(out, params);
    return out;
}

}  // namespace kreg
