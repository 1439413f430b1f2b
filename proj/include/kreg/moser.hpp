#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "kreg/batch.hpp"
#include "kreg/check_report.hpp"
#include "kreg/integrate.hpp"
#include "kreg/kappa_phase.hpp"
#include "kreg/stereo.hpp"

namespace kreg {

/// F(u, v) = |u|^2 |v|^2 / 2.
double sphere_hamiltonian(const SphereState& s);

/// Geodesic vector field (v, -|v|^2 u).
std::pair<Vec, Vec> geodesic_rhs(const SphereState& s);

/// Geodesic flow on the flat state (u, v); projects onto the constraint
/// surface, monitors F and records F, |u| - 1 and <u, v>.
OdeSystem sphere_ode(Eigen::Index d);

/// Maps a flat (u, v) state back onto |u| = 1, <u, v> = 0.
void project_sphere(Vec& state);

SphereState sphere_from_flat(const Vec& state);
Vec flat(const SphereState& s);

/// Functions on the realized chart (psi, phi); Commutative points are accepted too.
double pulled_back_F(const PhasePoint& pt);
/// G = (|psi|^2 + 1) |phi| / 2 - 1.
double g_hamiltonian(const PhasePoint& pt);
/// H = |psi|^2 / 2 - 1 / |phi|. Throws MomentumCollision when |phi| < 1e-12.
double moser_kepler_hamiltonian(const PhasePoint& pt);

/// Analytic gradients in the flat (psi, phi) layout.
Vec pulled_back_F_gradient(const PhasePoint& pt);
Vec g_hamiltonian_gradient(const PhasePoint& pt);
Vec moser_kepler_hamiltonian_gradient(const PhasePoint& pt);

inline constexpr double kMomentumGuard = 1e-12;

/// Kepler position := phi, Kepler momentum := psi. Applied to a Kepler point
/// it exchanges back into the realized chart.
PhasePoint role_swap(const PhasePoint& pt);

enum class Quadrature { Trapezoid, Refined };

/// Cumulative integral of `values` over `params`. Refined combines the
/// trapezoid on the full and doubled spacing (Simpson) where the grid allows.
std::vector<double> cumulative_integral(std::span<const double> params, std::span<const double> values,
                                        Quadrature rule = Quadrature::Trapezoid);

/// Re-indexes `traj` by t = integral of factor(state) d(param). The old
/// parameter is appended as the invariant column "s". Throws
/// DegenerateParametrization when the factor drops below 1e-12.
Trajectory reparametrize(const Trajectory& traj, const std::function<double(const Vec&)>& factor,
                         Quadrature rule = Quadrature::Trapezoid);

struct MoserChain {
    SphereState sphere_state;
    PhasePoint pulled_point;
    PhasePoint kepler_point;
    double s_param = 0.0;
    double t_a = 0.0;
};

MoserChain moser_chain(const SphereState& s, const KappaParams& params, double s_param = 0.0, double t_a = 0.0);

struct PipelineConfig {
    double duration = 10.0;
    double step = 1e-3;
    Quadrature quadrature = Quadrature::Trapezoid;
};

/// Geodesic flow from s0 (F = 1/2), pushed through the realized stereographic
/// chart and the role swap, indexed by t_a. States are (q, p) = (phi, psi);
/// invariants are s, H, F, |u| - 1 and <u, v>.
Trajectory moser_pipeline(const SphereState& s0, const KappaParams& params, const PipelineConfig& config = {});

/// Compares the pipeline against direct unit Kepler integration. The swapped
/// chart runs the Kepler flow backwards, so the reference starts at (q0, -p0)
/// and is compared with (q, -p). Samples with |q| <= min_radius are skipped;
/// comparison stops if the reference run hits the collision.
CheckReport moser_flow_check(const Trajectory& pipeline, double tolerance = 1e-5, double min_radius = 1e-3,
                             double reference_step = 1e-3);

/// Sphere state whose Moser image is the unit Kepler point (q, p) on H = -1/2
/// (time-reversed orientation: momentum enters as -p).
SphereState sphere_state_for_kepler(const Vec& q, const Vec& p, const KappaParams& params);

/// Pointwise identities: F o kappa_stereo_forward = F, analytic vs finite
/// difference gradients of F, G and H, grad G = grad F and H = -1/2 on F = 1/2,
/// and H o role_swap = moser_kepler_hamiltonian.
std::vector<CheckReport> moser_identity_audit(const KappaParams& params, std::size_t n_points, std::uint64_t seed,
                                              batch::Exec exec = batch::default_exec());

/// Unit Kepler ellipse of eccentricity 0.6 on H = -1/2 (perihelion 0.4, inclined plane).
std::pair<Vec, Vec> moser_reference_orbit();

/// Energy pinning |H + 1/2| < 1e-7, constraint drift < 1e-8 and the flow
/// correspondence for the reference orbit.
std::vector<CheckReport> moser_pipeline_audit(const KappaParams& params, const PipelineConfig& config = {});

/// Radial fall from |q| = 2 with p = 0: direct adaptive Verlet integration
/// must stop at the collision, the sphere-side pipeline must run the full
/// duration with geodesic invariants drifting < 1e-8.
std::vector<CheckReport> regularization_demo(const KappaParams& params, const PipelineConfig& config = {});

}  // namespace kreg
