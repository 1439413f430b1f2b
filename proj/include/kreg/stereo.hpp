#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kreg/batch.hpp"
#include "kreg/check_report.hpp"
#include "kreg/kappa_phase.hpp"
#include "kreg/numdiff.hpp"
#include "kreg/sampling.hpp"

namespace kreg {

/// Point (u, v) of T*S^d embedded in R^(d+1) x R^(d+1).
struct SphereState {
    Vec u;
    Vec v;

    Eigen::Index dim() const noexcept { return u.size() - 1; }
    /// max(| |u| - 1 |, |<u,v>|).
    double constraint_residual() const;
    /// Throws InvalidState if |u| != 1 or <u,v> != 0 beyond `tol`.
    void validate(double tol = 1e-10) const;
};

inline constexpr double kPoleGuard = 1e-12;

/// (u, v) -> (X, Y): X = u'/(1 - u_n), Y = v'(1 - u_n) + v_n u'. Throws PoleSingularity.
PhasePoint stereo_forward(const SphereState& s);
/// (X, Y) -> (u, v) with v' = (X^2+1)Y/2 - <X,Y>X and v_n = <X,Y>.
SphereState stereo_inverse(const PhasePoint& pt);

/// Same formulas on the realized pair (psi, phi); norms on the commutative representatives.
PhasePoint kappa_stereo_forward(const SphereState& s, const KappaParams& params);
SphereState kappa_stereo_inverse(const PhasePoint& pt);

/// Local Darboux chart of T*S^d: drop the axis where |u| is largest. The
/// coordinates are (u_k, w_k) for k != dropped with w_k = v_k - v_j u_k / u_j.
struct SphereChart {
    Eigen::Index dropped = 0;
    double sign = 1.0;
    Eigen::Index ambient = 0;  // d + 1
};

SphereChart choose_chart(const Vec& u);
Vec to_chart(const SphereState& s, const SphereChart& chart);
SphereState from_chart(const Vec& coords, const SphereChart& chart);

/// Standard symplectic matrix [[0, I], [-I, 0]] of size 2n.
Mat symplectic_matrix(Eigen::Index n);

/// Entrywise max |J^T Omega J - Omega| of a map between flat phase spaces.
double symplectic_residual(const VectorMap& map, const Vec& z, double h = kDefaultStep);

/// Single-point report of the residual above.
CheckReport symplectic_check(const VectorMap& map, const Vec& z, double h = kDefaultStep,
                             std::string name = "symplectic", double tolerance = 1e-6);

/// Uniform point on S^d with a random tangent momentum; resampled while u_n > max_un.
SphereState random_sphere_state(Rng& rng, Eigen::Index d, double max_un = 0.9, double speed = -1.0);

/// Canonicity of stereo_inverse / stereo_forward in the Darboux chart, the
/// realized composites (x,p) -> sphere and sphere -> (x,p) with their
/// conformal factors lambda^(+-2), constraint residuals and all round trips.
std::vector<CheckReport> stereo_audit(const KappaParams& params, std::size_t n_points, std::uint64_t seed,
                                      batch::Exec exec = batch::default_exec());

}  // namespace kreg
