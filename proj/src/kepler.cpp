#include "kreg/kepler.hpp"

#include <cmath>
#include <numbers>

#include "kreg/error.hpp"
#include "kreg/numdiff.hpp"

namespace kreg {

KeplerSystem KeplerSystem::from_params(const KappaParams& params)
{
    params.validate();
    const double mass_den = 1.0 + params.a * params.alpha * params.m;
    if (!(mass_den > 0.0)) {
        fail(ErrorKind::InvalidParams, "deformed mass needs 1 + a alpha m > 0");
    }
    KeplerSystem sys;
    sys.params = params;
    sys.mu_tilde = params.m / mass_den;
    sys.c_tilde = params.C * params.lambda();
    if (!(sys.c_tilde > 0.0)) {
        fail(ErrorKind::InvalidParams, "deformed coupling needs 1 + a alpha p0 > 0");
    }
    return sys;
}

KeplerSystem KeplerSystem::unit() { return KeplerSystem{}; }

double KeplerSystem::circular_speed(double radius) const { return std::sqrt(mu_tilde * c_tilde / radius); }

double KeplerSystem::period(double semi_major_axis) const
{
    return 2.0 * std::numbers::pi * std::sqrt(mu_tilde * std::pow(semi_major_axis, 3) / c_tilde);
}

namespace {

double radius_checked(const Vec& q)
{
    const double r = q.norm();
    if (!(r >= kCollisionRadius)) {
        fail(ErrorKind::Collision, "Kepler collision: |q| < 1e-12");
    }
    return r;
}

}  // namespace

double kepler_hamiltonian(const Vec& q, const Vec& p, const KeplerSystem& sys)
{
    const double r = radius_checked(q);
    return p.squaredNorm() / (2.0 * sys.mu_tilde) - sys.c_tilde / r;
}

std::pair<Vec, Vec> kepler_rhs(const Vec& q, const Vec& p, const KeplerSystem& sys)
{
    const double r = radius_checked(q);
    return {p / sys.mu_tilde, -sys.c_tilde * q / (r * r * r)};
}

OdeSystem kepler_ode(const KeplerSystem& sys, Eigen::Index d)
{
    OdeSystem ode;
    ode.separable = true;
    ode.rhs = [sys, d](const Vec& y) {
        auto [dq, dp] = kepler_rhs(y.head(d), y.tail(d), sys);
        return concat(dq, dp);
    };
    ode.monitor = [sys, d](const Vec& y) { return kepler_hamiltonian(y.head(d), y.tail(d), sys); };
    // Below 0.05 the step follows r^(3/2), rounded down to a power-of-two fraction.
    ode.step_scale = [d](const Vec& y) {
        const double r = y.head(d).norm();
        if (!(r < kNearCollisionRadius)) {
            return 1.0;
        }
        return std::exp2(-std::ceil(1.5 * std::log2(kNearCollisionRadius / r)));
    };
    if (d == 3) {
        ode.invariant_names = {"H", "L1", "L2", "L3", "A1", "A2", "A3"};
        ode.invariants = [sys](const Vec& y) {
            const ConservedSet c = conserved_set(y.head<3>(), y.tail<3>(), sys);
            Vec out(7);
            out << c.energy, c.L, c.A;
            return out;
        };
    } else {
        ode.invariant_names = {"H"};
        ode.invariants = [sys, d](const Vec& y) {
            Vec out(1);
            out << kepler_hamiltonian(y.head(d), y.tail(d), sys);
            return out;
        };
    }
    return ode;
}

double orbit_scale(double energy, const KeplerSystem& sys)
{
    if (!(energy < 0.0)) {
        fail(ErrorKind::PositiveEnergy, "state is not in Sigma_- (H >= 0)");
    }
    return std::sqrt(sys.mu_tilde / (-2.0 * energy));
}

ConservedSet conserved_set(const Vec3& q, const Vec3& p, const KeplerSystem& sys)
{
    ConservedSet c;
    const double r = radius_checked(q);
    c.energy = p.squaredNorm() / (2.0 * sys.mu_tilde) - sys.c_tilde / r;
    c.L = q.cross(p);
    c.A = p.cross(c.L) / sys.mu_tilde - sys.c_tilde * q / r;
    if (c.energy < 0.0) {
        const Vec3 B = orbit_scale(c.energy, sys) * c.A;
        c.B = B;
        c.U = 0.5 * (c.L + B);
        c.V = 0.5 * (c.L - B);
    }
    return c;
}

std::pair<Vec3, Vec3> random_sigma_minus(Rng& rng, const KeplerSystem& sys)
{
    constexpr double r_min = 0.5;
    constexpr double r_max = 2.0;
    constexpr double margin = -0.01;
    const double p_max = std::sqrt(2.0 * sys.mu_tilde * sys.c_tilde / r_min);
    for (;;) {
        Vec3 dir(rng.normal(), rng.normal(), rng.normal());
        if (dir.norm() < 1e-12) {
            continue;
        }
        const Vec3 q = dir.normalized() * rng.uniform(r_min, r_max);
        Vec3 p(rng.uniform(-p_max, p_max), rng.uniform(-p_max, p_max), rng.uniform(-p_max, p_max));
        if (p.norm() > p_max) {
            continue;
        }
        if (kepler_hamiltonian(q, p, sys) < margin) {
            return {q, p};
        }
    }
}

namespace {

constexpr double kSo4Tol = 1e-5;

double levi_civita(int i, int j, int k)
{
    return 0.5 * static_cast<double>((i - j) * (j - k) * (k - i));
}

}  // namespace

std::vector<CheckReport> so4_audit(const KeplerSystem& sys, std::size_t n_points, std::uint64_t seed,
                                   batch::Exec exec)
{
    if (n_points == 0) {
        fail(ErrorKind::InvalidParams, "so4_audit needs at least one point");
    }
    Rng rng(seed);
    std::vector<Vec> points;
    for (std::size_t k = 0; k < n_points; ++k) {
        auto [q, p] = random_sigma_minus(rng, sys);
        points.push_back(concat(q, p));
    }

    // (L, B) stacked; brackets follow from the Jacobian rows.
    const VectorMap generators = [sys](const Vec& z) {
        const ConservedSet c = conserved_set(z.head<3>(), z.tail<3>(), sys);
        if (!c.bound()) {
            fail(ErrorKind::PositiveEnergy, "so(4) generators need H < 0");
        }
        Vec out(6);
        out << c.L, *c.B;
        return out;
    };
    const Mat omega = [] {
        Mat o = Mat::Zero(6, 6);
        o.topRightCorner(3, 3) = Mat::Identity(3, 3);
        o.bottomLeftCorner(3, 3) = -Mat::Identity(3, 3);
        return o;
    }();

    constexpr std::size_t width = 6;
    const auto rows = batch::evaluate_rows(
        n_points, width,
        [&](std::size_t idx, double* row) {
            const Vec& z = points[idx];
            const Vec g = generators(z);
            const Mat J = jacobian(generators, z);
            // Gradients of U = (L + B)/2 and V = (L - B)/2.
            const Mat JL = J.topRows(3);
            const Mat JB = J.bottomRows(3);
            const Mat JU = 0.5 * (JL + JB);
            const Mat JV = 0.5 * (JL - JB);
            const Vec3 L = g.head<3>();
            const Vec3 B = g.tail<3>();
            const Vec3 U = 0.5 * (L + B);
            const Vec3 V = 0.5 * (L - B);
            auto bracket = [&omega](const Mat& Ja, int i, const Mat& Jb, int j) {
                return Ja.row(i).dot(omega * Jb.row(j).transpose());
            };
            double r_ll = 0, r_lb = 0, r_bb = 0, r_uu = 0, r_vv = 0, r_uv = 0;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    double eL = 0, eB = 0, eU = 0, eV = 0;
                    for (int k = 0; k < 3; ++k) {
                        const double e = levi_civita(i, j, k);
                        eL += e * L[k];
                        eB += e * B[k];
                        eU += e * U[k];
                        eV += e * V[k];
                    }
                    r_ll = std::max(r_ll, std::abs(bracket(JL, i, JL, j) - eL));
                    r_lb = std::max(r_lb, std::abs(bracket(JL, i, JB, j) - eB));
                    r_bb = std::max(r_bb, std::abs(bracket(JB, i, JB, j) - eL));
                    r_uu = std::max(r_uu, std::abs(bracket(JU, i, JU, j) - eU));
                    r_vv = std::max(r_vv, std::abs(bracket(JV, i, JV, j) - eV));
                    r_uv = std::max(r_uv, std::abs(bracket(JU, i, JV, j)));
                }
            }
            row[0] = r_ll;
            row[1] = r_lb;
            row[2] = r_bb;
            row[3] = r_uu;
            row[4] = r_vv;
            row[5] = r_uv;
        },
        exec);

    static const char* names[width] = {"{L_i,L_j} = eps_ijk L_k", "{L_i,B_j} = eps_ijk B_k",
                                       "{B_i,B_j} = eps_ijk L_k", "{U_i,U_j} = eps_ijk U_k",
                                       "{V_i,V_j} = eps_ijk V_k", "{U_i,V_j} = 0"};
    std::vector<CheckReport> reports;
    for (std::size_t c = 0; c < width; ++c) {
        std::vector<double> col(n_points);
        for (std::size_t k = 0; k < n_points; ++k) {
            col[k] = rows[width * k + c];
        }
        CheckReport r = summarize(names[c], col, kSo4Tol);
        r.details["a"] = sys.params.a;
        r.details["mu_tilde"] = sys.mu_tilde;
        r.details["c_tilde"] = sys.c_tilde;
        reports.push_back(std::move(r));
    }
    return reports;
}

std::vector<CheckReport> kepler_identity_audit(const KeplerSystem& sys, std::size_t n_points, std::uint64_t seed,
                                               batch::Exec exec)
{
    if (n_points == 0) {
        fail(ErrorKind::InvalidParams, "kepler_identity_audit needs at least one point");
    }
    Rng rng(seed);
    std::vector<std::pair<Vec3, Vec3>> points;
    for (std::size_t k = 0; k < n_points; ++k) {
        points.push_back(random_sigma_minus(rng, sys));
    }
    const auto rows = batch::evaluate_rows(
        n_points, 2,
        [&](std::size_t idx, double* row) {
            const auto& [q, p] = points[idx];
            const ConservedSet c = conserved_set(q, p, sys);
            row[0] = std::abs(c.L.dot(c.A));
            row[1] = std::abs(c.A.squaredNorm() -
                              (sys.c_tilde * sys.c_tilde + 2.0 * c.energy * c.L.squaredNorm() / sys.mu_tilde));
        },
        exec);
    std::vector<double> orth(n_points);
    std::vector<double> magnitude(n_points);
    for (std::size_t k = 0; k < n_points; ++k) {
        orth[k] = rows[2 * k];
        magnitude[k] = rows[2 * k + 1];
    }
    std::vector<CheckReport> out{summarize("<L, A> = 0", orth, 1e-10),
                                 summarize("|A|^2 = C~^2 + 2 H |L|^2 / mu~", magnitude, 1e-8)};
    for (auto& r : out) {
        r.details["a"] = sys.params.a;
        r.details["mu_tilde"] = sys.mu_tilde;
        r.details["c_tilde"] = sys.c_tilde;
    }
    return out;
}

}  // namespace kreg
