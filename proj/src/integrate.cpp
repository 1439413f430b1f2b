#include "kreg/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kreg/error.hpp"

namespace kreg {

std::string_view to_string(Method m) noexcept
{
    switch (m) {
    case Method::StormerVerlet: return "verlet";
    case Method::ImplicitMidpoint: return "midpoint";
    case Method::RK4: return "rk4";
    }
    return "unknown";
}

std::string_view to_string(Termination t) noexcept
{
    switch (t) {
    case Termination::Completed: return "Completed";
    case Termination::Collision: return "Collision";
    case Termination::MinStepReached: return "MinStepReached";
    case Termination::NonFinite: return "NonFinite";
    }
    return "Unknown";
}

Method method_from_string(std::string_view name)
{
    for (Method m : {Method::StormerVerlet, Method::ImplicitMidpoint, Method::RK4}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    fail(ErrorKind::Usage, "unknown integrator '" + std::string(name) + "' (verlet, midpoint, rk4)");
}

void IntegratorConfig::validate() const
{
    if (!(step > 0.0) || !(min_step > 0.0) || !(step > min_step)) {
        fail(ErrorKind::InvalidParams, "integrator needs step > min_step > 0");
    }
    if (!(tolerance > 0.0)) {
        fail(ErrorKind::InvalidParams, "integrator tolerance must be positive");
    }
}

namespace {

constexpr double kMidpointTol = 1e-13;
constexpr int kMidpointIters = 25;
constexpr int kGrowAfter = 20;

Vec verlet_step(const OdeSystem& sys, const Vec& y, double h)
{
    const Eigen::Index n = y.size() / 2;
    Vec z = y;
    z.tail(n) += 0.5 * h * sys.rhs(z).tail(n);
    z.head(n) += h * sys.rhs(z).head(n);
    z.tail(n) += 0.5 * h * sys.rhs(z).tail(n);
    return z;
}

Vec midpoint_step(const OdeSystem& sys, const Vec& y, double h)
{
    Vec next = y + h * sys.rhs(y);
    for (int it = 0; it < kMidpointIters; ++it) {
        const Vec updated = y + h * sys.rhs(0.5 * (y + next));
        const double change = (updated - next).cwiseAbs().maxCoeff();
        next = updated;
        if (change < kMidpointTol) {
            break;
        }
    }
    return next;
}

Vec rk4_step(const OdeSystem& sys, const Vec& y, double h)
{
    const Vec k1 = sys.rhs(y);
    const Vec k2 = sys.rhs(y + 0.5 * h * k1);
    const Vec k3 = sys.rhs(y + 0.5 * h * k2);
    const Vec k4 = sys.rhs(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool is_singular(ErrorKind k)
{
    return k == ErrorKind::Collision || k == ErrorKind::MomentumCollision || k == ErrorKind::ZeroFiber ||
           k == ErrorKind::PoleSingularity;
}

Sample make_sample(const OdeSystem& sys, double t, const Vec& y)
{
    return Sample{t, y, sys.invariants ? sys.invariants(y) : Vec()};
}

}  // namespace

Vec integrator_step(const OdeSystem& sys, const Vec& y, double h, Method method)
{
    switch (method) {
    case Method::StormerVerlet:
        if (!sys.separable || y.size() % 2 != 0) {
            fail(ErrorKind::InvalidParams, "Stormer-Verlet needs a separable (q, p) system");
        }
        return verlet_step(sys, y, h);
    case Method::ImplicitMidpoint: return midpoint_step(sys, y, h);
    case Method::RK4: return rk4_step(sys, y, h);
    }
    return y;
}

Trajectory integrate(const OdeSystem& sys, const Vec& y0, double duration, const IntegratorConfig& config,
                     double t0)
{
    config.validate();
    if (!y0.allFinite()) {
        fail(ErrorKind::InvalidState, "initial state is not finite");
    }
    if (!(duration >= 0.0)) {
        fail(ErrorKind::InvalidParams, "duration must be non-negative");
    }
    if (config.method == Method::StormerVerlet && !sys.separable) {
        fail(ErrorKind::InvalidParams, "Stormer-Verlet needs a separable (q, p) system");
    }

    Trajectory traj;
    traj.config = config;
    traj.invariant_names = sys.invariant_names;

    Vec y = y0;
    if (config.projection && sys.project) {
        sys.project(y);
    }
    double t = t0;
    const double t_end = t0 + duration;
    double h = config.step;
    int quiet_steps = 0;
    traj.samples.push_back(make_sample(sys, t, y));

    const bool control = config.adaptive && static_cast<bool>(sys.monitor);
    // Relative slack so a run of fixed steps lands on t_end without a sliver step.
    const double slack = 1e-9 * config.step;

    while (t < t_end - slack) {
        double h_use = h;
        if (config.adaptive && sys.step_scale) {
            const double cap = config.step * sys.step_scale(y);
            if (cap < config.min_step) {
                traj.termination = Termination::MinStepReached;
                traj.termination_detail = "state-dependent step limit fell below min_step";
                break;
            }
            h_use = std::min(h, cap);
        }
        const double h_try = std::min(h_use, t_end - t);
        Vec next;
        bool singular = false;
        try {
            next = integrator_step(sys, y, h_try, config.method);
            if (config.projection && sys.project) {
                sys.project(next);
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NonFiniteEvaluation) {
                traj.termination = Termination::NonFinite;
                traj.termination_detail = e.what();
                break;
            }
            if (!is_singular(e.kind())) {
                throw;
            }
            singular = true;
            traj.termination_detail = e.what();
        }

        if (singular) {
            if (!config.adaptive || 0.5 * h_try < config.min_step) {
                traj.termination = Termination::Collision;
                break;
            }
            h = 0.5 * h_try;
            quiet_steps = 0;
            continue;
        }
        if (!next.allFinite()) {
            if (config.adaptive && 0.5 * h_try >= config.min_step) {
                h = 0.5 * h_try;
                quiet_steps = 0;
                continue;
            }
            traj.termination = Termination::NonFinite;
            traj.termination_detail = "state became non-finite";
            break;
        }

        if (control) {
            const double drift = std::abs(sys.monitor(next) - sys.monitor(y));
            if (!(drift <= config.tolerance)) {
                if (0.5 * h_try < config.min_step) {
                    traj.termination = Termination::MinStepReached;
                    traj.termination_detail = "step fell below min_step";
                    break;
                }
                h = 0.5 * h_try;
                quiet_steps = 0;
                continue;
            }
            quiet_steps = drift < 0.1 * config.tolerance ? quiet_steps + 1 : 0;
            if (quiet_steps >= kGrowAfter) {
                h = std::min(2.0 * h, config.step);
                quiet_steps = 0;
            }
        }

        y = std::move(next);
        t = (t_end - (t + h_try) <= slack) ? t_end : t + h_try;
        traj.samples.push_back(make_sample(sys, t, y));
    }
    return traj;
}

Vec propagate(const OdeSystem& sys, const Vec& y0, double duration, double max_step, Method method, bool projection)
{
    if (duration == 0.0) {
        return y0;
    }
    const auto n = static_cast<long>(std::ceil(std::abs(duration) / max_step));
    const double h = duration / static_cast<double>(n);
    Vec y = y0;
    for (long k = 0; k < n; ++k) {
        y = integrator_step(sys, y, h, method);
        if (projection && sys.project) {
            sys.project(y);
        }
    }
    return y;
}

namespace {

CheckReport drift_of(std::string name, const std::vector<double>& values, double tolerance)
{
    std::vector<double> drift(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        drift[k] = std::abs(values[k] - values.front());
    }
    CheckReport r = summarize(std::move(name), drift, tolerance);
    r.details["terminal_drift"] = drift.empty() ? 0.0 : drift.back();
    return r;
}

}  // namespace

std::vector<CheckReport> drift_report(const Trajectory& traj, double tolerance)
{
    std::vector<CheckReport> out;
    for (std::size_t c = 0; c < traj.invariant_names.size(); ++c) {
        std::vector<double> values;
        values.reserve(traj.samples.size());
        for (const auto& s : traj.samples) {
            values.push_back(s.invariants[static_cast<Eigen::Index>(c)]);
        }
        out.push_back(drift_of("drift " + traj.invariant_names[c], values, tolerance));
    }
    return out;
}

std::vector<CheckReport> drift_report(const Trajectory& traj,
                                      const std::vector<std::pair<std::string, std::function<double(const Vec&)>>>& fns,
                                      double tolerance)
{
    std::vector<CheckReport> out;
    for (const auto& [name, fn] : fns) {
        std::vector<double> values;
        values.reserve(traj.samples.size());
        for (const auto& s : traj.samples) {
            values.push_back(fn(s.state));
        }
        out.push_back(drift_of("drift " + name, values, tolerance));
    }
    return out;
}

}  // namespace kreg
