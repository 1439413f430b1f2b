#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kreg/batch.hpp"
#include "kreg/check_report.hpp"
#include "kreg/integrate.hpp"
#include "kreg/kepler.hpp"

namespace kreg {

/// Point (x, y) of T+S^3 inside R^4 x R^4.
struct DelaunayState {
    Vec4 x = Vec4::Zero();
    Vec4 y = Vec4::Zero();

    /// c1 = (<x,x> - 1) / 2.
    double c1() const { return 0.5 * (x.squaredNorm() - 1.0); }
    /// c2 = <x,y>.
    double c2() const { return x.dot(y); }
    /// Throws InvalidState off the constraint surface and ZeroFiber at y = 0.
    void validate(double tol = 1e-10) const;

    Vec flat() const;
    static DelaunayState from_flat(const Vec& z);
};

struct LSFrame {
    Vec4 A = Vec4::Zero();
    Vec4 B = Vec4::Zero();
    /// sqrt(mu~ / (-2H)).
    double nu = 0.0;
    /// Fiber radius |y| = C~ nu; equals nu at unit coupling.
    double scale = 0.0;
    double theta = 0.0;
};

inline constexpr double kZeroFiberGuard = 1e-24;

/// Delaunay mass bound to the Kepler system: C~ sqrt(mu~), so that the
/// Delaunay energy of an image equals the Kepler energy.
double delaunay_mass(const KeplerSystem& sys);

/// -mu^2 / (2 <y,y>). Throws ZeroFiber.
double delaunay_hamiltonian(const DelaunayState& st, double mu);
/// -mu^2 / (2 <y,y>) - <x,y>^2 + (mu^2 / <y,y>) (<x,x> - 1) / 2.
double dirac_hamiltonian(const DelaunayState& st, double mu);
/// H - sum_ij {H, c_i} C_ij c_j with C = (1/<x,x>) [[0, -1], [1, 0]].
double dirac_projected_hamiltonian(const DelaunayState& st, double mu);

/// (mu^2 y / <y,y>^2, -mu^2 x / <y,y>).
std::pair<Vec4, Vec4> delaunay_rhs(const DelaunayState& st, double mu);

/// Flow on the flat (x, y) state; records c1, c2, <y,y> and the six x^y components.
OdeSystem delaunay_ode(double mu);

/// Closed-form great-circle solution at time t (angular rate mu^2 / |y|^3).
DelaunayState delaunay_exact(const DelaunayState& st, double mu, double t);

/// Components x_i y_j - x_j y_i for i < j in lexicographic order.
Eigen::Matrix<double, 6, 1> bivector(const DelaunayState& st);

/// max(| <y,y> difference |, max | x^y difference |).
double delaunay_orbit_residual(const DelaunayState& a, const DelaunayState& b);

/// Ligon-Schaaf map of a bound Kepler state. Throws PositiveEnergy, Collision.
std::pair<DelaunayState, LSFrame> ls_forward(const Vec3& q, const Vec3& p, const KeplerSystem& sys);

/// Closed-form inverse of ls_forward. Throws DegenerateFiber on the collision fiber.
std::pair<Vec3, Vec3> ls_inverse_closed_form(const DelaunayState& st, const KeplerSystem& sys);

/// Closed-form seed polished by damped Gauss-Newton on ls_forward(q, p) = st.
/// Throws NoConvergence after 50 iterations, DegenerateFiber.
std::pair<Vec3, Vec3> ls_inverse(const DelaunayState& st, const KeplerSystem& sys);

struct IntertwineResiduals {
    double cross = 0.0;  // |x~ x y~ - q x p|
    double axis = 0.0;   // |x4 y~ - y4 x~ - scale (q^ - p x (q x p) / (mu~ C~))|
};

IntertwineResiduals intertwine_residuals(const Vec3& q, const Vec3& p, const KeplerSystem& sys);

/// Single-point report of both momentum-map identities.
CheckReport intertwine_check(const Vec3& q, const Vec3& p, const KeplerSystem& sys, double tolerance = 1e-10);

/// Both identities, constraint residuals, energy match, frame orthonormality
/// and <y,y> = scale^2 over seeded Sigma_- points.
std::vector<CheckReport> intertwine_audit(const KeplerSystem& sys, std::size_t n_points, std::uint64_t seed,
                                          batch::Exec exec = batch::default_exec(), double tolerance = 1e-10);

/// Kepler flow (RK4) mapped by LS against the Delaunay closed form from the
/// initial image. The Delaunay time is read off the unwrapped great-circle
/// angle; details carry the measured rate tau / t, the largest |tau - t| and
/// the orbit-membership residual.
CheckReport flow_conjugacy_check(const Vec3& q, const Vec3& p, const KeplerSystem& sys, double duration,
                                 double step = 1e-3, std::size_t n_samples = 50, double tolerance = 1e-5);

/// ls_inverse(ls_forward(q, p)) over seeded Sigma_- points.
CheckReport ls_round_trip_audit(const KeplerSystem& sys, std::size_t n_points, std::uint64_t seed,
                                batch::Exec exec = batch::default_exec(), double tolerance = 1e-8);

/// Delaunay flow (RK4) from the LS image of a seeded Sigma_- point: drift of
/// c1, c2, <y,y> and x^y; integrated vs closed-form circular motion; the
/// displayed Dirac Hamiltonian against H~ and the projected construction on
/// the constraint surface.
std::vector<CheckReport> delaunay_dynamics_audit(const KeplerSystem& sys, std::uint64_t seed, double duration = 10.0,
                                                 double step = 1e-3);

}  // namespace kreg
