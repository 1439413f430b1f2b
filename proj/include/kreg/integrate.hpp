#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kreg/check_report.hpp"
#include "kreg/linalg.hpp"

namespace kreg {

enum class Method { StormerVerlet, ImplicitMidpoint, RK4 };
enum class Termination { Completed, Collision, MinStepReached, NonFinite };

std::string_view to_string(Method m) noexcept;
std::string_view to_string(Termination t) noexcept;
Method method_from_string(std::string_view name);

struct IntegratorConfig {
    Method method = Method::RK4;
    double step = 1e-3;
    bool adaptive = false;
    double min_step = 1e-10;
    bool projection = false;
    /// Per-step drift of the monitored invariant allowed in adaptive mode.
    double tolerance = 1e-10;

    void validate() const;
};

/// First-order system y' = rhs(y). For StormerVerlet the state is (q, p) with
/// dq/dt depending on p only and dp/dt on q only.
struct OdeSystem {
    std::function<Vec(const Vec&)> rhs;
    bool separable = false;
    /// Maps a state back onto its constraint manifold (sphere states).
    std::function<void(Vec&)> project;
    /// Invariant whose per-step change drives adaptive step control.
    std::function<double(const Vec&)> monitor;
    /// Adaptive mode only: fraction of the configured step allowed at a state.
    std::function<double(const Vec&)> step_scale;
    /// Snapshot recorded with every sample.
    std::vector<std::string> invariant_names;
    std::function<Vec(const Vec&)> invariants;
};

struct Sample {
    double param = 0.0;
    Vec state;
    Vec invariants;
};

struct Trajectory {
    std::string chart;
    std::vector<std::string> state_names;
    std::vector<std::string> invariant_names;
    std::string param_name = "t";
    std::vector<Sample> samples;
    IntegratorConfig config;
    std::map<std::string, double> system_params;
    Termination termination = Termination::Completed;
    std::string termination_detail;

    double final_param() const { return samples.empty() ? 0.0 : samples.back().param; }
};

/// One step of the chosen method (no projection, no step control).
Vec integrator_step(const OdeSystem& sys, const Vec& y, double h, Method method);

/// Integrates from param t0 over `duration`. Singular right-hand sides and
/// non-finite states end the run with the matching termination reason.
Trajectory integrate(const OdeSystem& sys, const Vec& y0, double duration, const IntegratorConfig& config,
                     double t0 = 0.0);

/// Fixed-step propagation landing exactly on `duration`; returns the final state.
Vec propagate(const OdeSystem& sys, const Vec& y0, double duration, double max_step, Method method,
              bool projection = false);

/// Max and terminal drift of every recorded invariant.
std::vector<CheckReport> drift_report(const Trajectory& traj, double tolerance);

/// Same, for invariants evaluated from the stored states.
std::vector<CheckReport> drift_report(const Trajectory& traj,
                                      const std::vector<std::pair<std::string, std::function<double(const Vec&)>>>& fns,
                                      double tolerance);

}  // namespace kreg
