#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "kreg/batch.hpp"
#include "kreg/check_report.hpp"
#include "kreg/integrate.hpp"
#include "kreg/kappa_phase.hpp"
#include "kreg/sampling.hpp"

namespace kreg {

inline constexpr double kCollisionRadius = 1e-12;
/// Adaptive runs shrink the step below this radius.
inline constexpr double kNearCollisionRadius = 0.05;

/// Deformed Kepler problem H = |p|^2 / (2 mu~) - C~ / |q|.
struct KeplerSystem {
    double mu_tilde = 1.0;
    double c_tilde = 1.0;
    KappaParams params;

    /// mu~ = m / (1 + a alpha m), C~ = C (1 + a alpha p0). Throws InvalidParams
    /// if either is not positive.
    static KeplerSystem from_params(const KappaParams& params);
    /// mu~ = C~ = 1, a = 0.
    static KeplerSystem unit();

    double circular_speed(double radius) const;
    double period(double semi_major_axis) const;
};

double kepler_hamiltonian(const Vec& q, const Vec& p, const KeplerSystem& sys);
std::pair<Vec, Vec> kepler_rhs(const Vec& q, const Vec& p, const KeplerSystem& sys);

/// ODE on the flat state (q, p); separable, monitors H, records H, L and A.
OdeSystem kepler_ode(const KeplerSystem& sys, Eigen::Index d = 3);

struct ConservedSet {
    double energy = 0.0;
    Vec3 L = Vec3::Zero();
    Vec3 A = Vec3::Zero();
    /// B = nu A with nu = sqrt(mu~ / (-2H)); present only on Sigma_-.
    std::optional<Vec3> B;
    std::optional<Vec3> U;
    std::optional<Vec3> V;

    bool bound() const noexcept { return B.has_value(); }
};

ConservedSet conserved_set(const Vec3& q, const Vec3& p, const KeplerSystem& sys);

/// Scale of the Delaunay/so(4) normalization, nu = sqrt(mu~ / (-2H)). Throws PositiveEnergy.
double orbit_scale(double energy, const KeplerSystem& sys);

/// Sigma_- sample: q in the shell 0.5 <= |q| <= 2, p in a ball, H < -0.01.
std::pair<Vec3, Vec3> random_sigma_minus(Rng& rng, const KeplerSystem& sys);

/// Finite-difference brackets of (L, B) and (U, V) against their structure constants.
std::vector<CheckReport> so4_audit(const KeplerSystem& sys, std::size_t n_points, std::uint64_t seed,
                                   batch::Exec exec = batch::default_exec());

/// <L, A> = 0 and |A|^2 = C~^2 + 2H|L|^2/mu~ over seeded Sigma_- points.
std::vector<CheckReport> kepler_identity_audit(const KeplerSystem& sys, std::size_t n_points, std::uint64_t seed,
                                               batch::Exec exec = batch::default_exec());

}  // namespace kreg
