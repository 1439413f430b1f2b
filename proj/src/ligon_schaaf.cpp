#include "kreg/ligon_schaaf.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kreg/error.hpp"
#include "kreg/numdiff.hpp"

namespace kreg {

void DelaunayState::validate(double tol) const
{
    if (!x.allFinite() || !y.allFinite()) {
        fail(ErrorKind::InvalidState, "Delaunay state is not finite");
    }
    if (std::abs(c1()) > tol || std::abs(c2()) > tol) {
        fail(ErrorKind::InvalidState, "Delaunay state violates <x,x> = 1 or <x,y> = 0");
    }
    if (!(y.squaredNorm() >= kZeroFiberGuard)) {
        fail(ErrorKind::ZeroFiber, "Delaunay state on the zero section (y = 0)");
    }
}

Vec DelaunayState::flat() const { return concat(x, y); }

DelaunayState DelaunayState::from_flat(const Vec& z)
{
    if (z.size() != 8) {
        fail(ErrorKind::InvalidState, "Delaunay states have 8 components");
    }
    return DelaunayState{z.head<4>(), z.tail<4>()};
}

double delaunay_mass(const KeplerSystem& sys) { return sys.c_tilde * std::sqrt(sys.mu_tilde); }

namespace {

double fiber_checked(const DelaunayState& st)
{
    const double yy = st.y.squaredNorm();
    if (!(yy >= kZeroFiberGuard)) {
        fail(ErrorKind::ZeroFiber, "<y,y> < 1e-24");
    }
    return yy;
}

}  // namespace

double delaunay_hamiltonian(const DelaunayState& st, double mu)
{
    return -mu * mu / (2.0 * fiber_checked(st));
}

double dirac_hamiltonian(const DelaunayState& st, double mu)
{
    const double yy = fiber_checked(st);
    const double xy = st.c2();
    return -mu * mu / (2.0 * yy) - xy * xy + 0.5 * (mu * mu / yy) * (st.x.squaredNorm() - 1.0);
}

double dirac_projected_hamiltonian(const DelaunayState& st, double mu)
{
    const double yy = fiber_checked(st);
    const double xx = st.x.squaredNorm();
    const double mu2 = mu * mu;
    // {H, c1} = -mu^2 <x,y> / <y,y>^2, {H, c2} = -mu^2 / <y,y>.
    const double h_c1 = -mu2 * st.c2() / (yy * yy);
    const double h_c2 = -mu2 / yy;
    const double c12 = -1.0 / xx;
    const double c21 = 1.0 / xx;
    return -mu2 / (2.0 * yy) - (h_c1 * c12 * st.c2() + h_c2 * c21 * st.c1());
}

std::pair<Vec4, Vec4> delaunay_rhs(const DelaunayState& st, double mu)
{
    const double yy = fiber_checked(st);
    const double mu2 = mu * mu;
    return {mu2 * st.y / (yy * yy), -mu2 * st.x / yy};
}

Eigen::Matrix<double, 6, 1> bivector(const DelaunayState& st)
{
    Eigen::Matrix<double, 6, 1> w;
    int k = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            w[k++] = st.x[i] * st.y[j] - st.x[j] * st.y[i];
        }
    }
    return w;
}

OdeSystem delaunay_ode(double mu)
{
    OdeSystem ode;
    ode.rhs = [mu](const Vec& z) {
        auto [dx, dy] = delaunay_rhs(DelaunayState::from_flat(z), mu);
        Vec out(8);
        out << dx, dy;
        return out;
    };
    ode.monitor = [mu](const Vec& z) { return delaunay_hamiltonian(DelaunayState::from_flat(z), mu); };
    ode.invariant_names = {"c1", "c2", "yy", "w12", "w13", "w14", "w23", "w24", "w34"};
    ode.invariants = [](const Vec& z) {
        const DelaunayState st = DelaunayState::from_flat(z);
        Vec out(9);
        out << st.c1(), st.c2(), st.y.squaredNorm(), bivector(st);
        return out;
    };
    return ode;
}

DelaunayState delaunay_exact(const DelaunayState& st, double mu, double t)
{
    const double r = std::sqrt(fiber_checked(st));
    const double omega = mu * mu / (r * r * r);
    const Vec4 e = st.y / r;
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    return DelaunayState{c * st.x + s * e, r * (-s * st.x + c * e)};
}

double delaunay_orbit_residual(const DelaunayState& a, const DelaunayState& b)
{
    const double fiber = std::abs(a.y.squaredNorm() - b.y.squaredNorm());
    return std::max(fiber, (bivector(a) - bivector(b)).cwiseAbs().maxCoeff());
}

std::pair<DelaunayState, LSFrame> ls_forward(const Vec3& q, const Vec3& p, const KeplerSystem& sys)
{
    const double energy = kepler_hamiltonian(q, p, sys);
    LSFrame f;
    f.nu = orbit_scale(energy, sys);
    f.scale = sys.c_tilde * f.nu;
    const double coupling = sys.mu_tilde * sys.c_tilde;
    const double r = q.norm();
    const double qp = q.dot(p);
    f.A << q / r - qp * p / coupling, qp / f.scale;
    f.B << r * p / f.scale, r * p.squaredNorm() / coupling - 1.0;
    f.theta = qp / f.scale;
    const double s = std::sin(f.theta);
    const double c = std::cos(f.theta);
    DelaunayState st{f.A * s + f.B * c, f.scale * (-f.A * c + f.B * s)};
    return {st, f};
}

namespace {

// Root of theta - x4 sin(theta) + w cos(theta) = 0; the left side is non-decreasing.
double solve_anomaly(double x4, double w)
{
    auto f = [&](double t) { return t - x4 * std::sin(t) + w * std::cos(t); };
    double lo = -2.0;
    double hi = 2.0;
    double t = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double v = f(t);
        if (v == 0.0) {
            return t;
        }
        (v < 0.0 ? lo : hi) = t;
        const double dv = 1.0 - x4 * std::cos(t) - w * std::sin(t);
        double next = dv > 0.0 ? t - v / dv : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - t) < 1e-16 * (1.0 + std::abs(t)) || hi - lo < 1e-16) {
            return next;
        }
        t = next;
    }
    return t;
}

constexpr double kFiberGuard = 1e-12;
constexpr int kMaxIterations = 50;
constexpr double kStepTol = 1e-10;

}  // namespace

std::pair<Vec3, Vec3> ls_inverse_closed_form(const DelaunayState& st, const KeplerSystem& sys)
{
    st.validate(1e-8);
    const double scale = st.y.norm();
    const Vec4 w = st.y / scale;
    const double theta = solve_anomaly(st.x[3], w[3]);
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const Vec4 A = st.x * s - w * c;
    const Vec4 B = st.x * c + w * s;
    if (!(1.0 - B[3] > kFiberGuard)) {
        fail(ErrorKind::DegenerateFiber, "Delaunay state on the collision fiber (B4 = 1)");
    }
    const double coupling = sys.mu_tilde * sys.c_tilde;
    const double r = (1.0 - B[3]) * scale * scale / coupling;
    const Vec3 p = scale * B.head<3>() / r;
    const Vec3 q_hat = A.head<3>() + theta * scale * p / coupling;
    return {r * q_hat, p};
}

std::pair<Vec3, Vec3> ls_inverse(const DelaunayState& st, const KeplerSystem& sys)
{
    auto [q0, p0] = ls_inverse_closed_form(st, sys);
    const Vec target = st.flat();
    const VectorMap image = [&sys](const Vec& z) { return ls_forward(z.head<3>(), z.tail<3>(), sys).first.flat(); };
    auto residual = [&](const Vec& z) -> double {
        try {
            return (image(z) - target).cwiseAbs().maxCoeff();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    Vec z = concat(q0, p0);
    double res = residual(z);
    // Gauss-Newton in variables scaled by |q| and |p|.
    Vec scale(6);
    scale << Vec3::Constant(q0.norm()), Vec3::Constant(std::max(p0.norm(), 1e-8));
    const VectorMap scaled = [&](const Vec& w) { return image(w.cwiseProduct(scale)); };
    bool settled = false;
    for (int it = 0; it < kMaxIterations && res >= 1e-14; ++it) {
        Mat J;
        for (double h = kDefaultStep; h > 1e-15 && J.size() == 0; h *= 0.1) {
            try {
                J = jacobian(scaled, z.cwiseQuotient(scale), h);
            } catch (const Error&) {
            }
        }
        if (J.size() == 0) {
            break;
        }
        const Vec step = J.colPivHouseholderQr().solve(target - image(z)).cwiseProduct(scale);
        if (step.cwiseQuotient(scale).cwiseAbs().maxCoeff() <= kStepTol) {
            settled = true;
            break;
        }
        double damping = 1.0;
        bool improved = false;
        for (int k = 0; k < 30; ++k) {
            const Vec trial = z + damping * step;
            const double r = residual(trial);
            if (r < res) {
                z = trial;
                res = r;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved) {
            break;
        }
    }
    if (!(res < 1e-10) && !settled) {
        fail(ErrorKind::NoConvergence, "ls_inverse: Gauss-Newton residual " + std::to_string(res));
    }
    return {z.head<3>(), z.tail<3>()};
}

IntertwineResiduals intertwine_residuals(const Vec3& q, const Vec3& p, const KeplerSystem& sys)
{
    const auto [st, f] = ls_forward(q, p, sys);
    const Vec3 xt = st.x.head<3>();
    const Vec3 yt = st.y.head<3>();
    const Vec3 L = q.cross(p);
    const double coupling = sys.mu_tilde * sys.c_tilde;
    const Vec3 axis = f.scale * (q / q.norm() - p.cross(L) / coupling);
    return IntertwineResiduals{(xt.cross(yt) - L).cwiseAbs().maxCoeff(),
                               (st.x[3] * yt - st.y[3] * xt - axis).cwiseAbs().maxCoeff()};
}

namespace {

constexpr const char* kCrossName = "LS identity (1): x~ x y~ = q x p";
constexpr const char* kAxisName = "LS identity (2): x4 y~ - y4 x~ = nu0 [q/|q| - p x (q x p) / (mu~ C~)]";

void tag(CheckReport& r, const KeplerSystem& sys)
{
    r.details["a"] = sys.params.a;
    r.details["mu_tilde"] = sys.mu_tilde;
    r.details["c_tilde"] = sys.c_tilde;
    r.details["delaunay_mass"] = delaunay_mass(sys);
}

}  // namespace

CheckReport intertwine_check(const Vec3& q, const Vec3& p, const KeplerSystem& sys, double tolerance)
{
    const IntertwineResiduals res = intertwine_residuals(q, p, sys);
    const double worst = std::max(res.cross, res.axis);
    CheckReport r = summarize("LS intertwining identities", std::span<const double>(&worst, 1), tolerance);
    r.details["identity_1"] = res.cross;
    r.details["identity_2"] = res.axis;
    tag(r, sys);
    return r;
}

std::vector<CheckReport> intertwine_audit(const KeplerSystem& sys, std::size_t n_points, std::uint64_t seed,
                                          batch::Exec exec, double tolerance)
{
    if (n_points == 0) {
        fail(ErrorKind::InvalidParams, "intertwine_audit needs at least one point");
    }
    Rng rng(seed);
    std::vector<std::pair<Vec3, Vec3>> points;
    for (std::size_t k = 0; k < n_points; ++k) {
        points.push_back(random_sigma_minus(rng, sys));
    }
    const double mu = delaunay_mass(sys);
    constexpr std::size_t width = 7;
    const auto rows = batch::evaluate_rows(
        n_points, width,
        [&](std::size_t idx, double* row) {
            const auto& [q, p] = points[idx];
            const auto [st, f] = ls_forward(q, p, sys);
            const IntertwineResiduals res = intertwine_residuals(q, p, sys);
            const double scale2 = f.scale * f.scale;
            row[0] = res.cross;
            row[1] = res.axis;
            row[2] = std::abs(st.c1());
            row[3] = std::abs(st.c2());
            row[4] = std::abs(delaunay_hamiltonian(st, mu) - kepler_hamiltonian(q, p, sys));
            row[5] = std::max({std::abs(f.A.norm() - 1.0), std::abs(f.B.norm() - 1.0), std::abs(f.A.dot(f.B))});
            row[6] = std::abs(st.y.squaredNorm() - scale2) / std::max(1.0, scale2);
        },
        exec);
    static const char* names[width] = {kCrossName,
                                       kAxisName,
                                       "LS constraint c1 = (<x,x> - 1)/2 = 0",
                                       "LS constraint c2 = <x,y> = 0",
                                       "LS energy match: Delaunay H = Kepler H",
                                       "LS frame orthonormality |A| = |B| = 1, <A,B> = 0",
                                       "LS fiber <y,y> = (C~ nu)^2 (relative)"};
    std::vector<CheckReport> out;
    for (std::size_t c = 0; c < width; ++c) {
        std::vector<double> col(n_points);
        for (std::size_t k = 0; k < n_points; ++k) {
            col[k] = rows[width * k + c];
        }
        CheckReport r = summarize(names[c], col, tolerance);
        tag(r, sys);
        out.push_back(std::move(r));
    }
    return out;
}

CheckReport flow_conjugacy_check(const Vec3& q, const Vec3& p, const KeplerSystem& sys, double duration, double step,
                                 std::size_t n_samples, double tolerance)
{
    if (!(duration > 0.0) || n_samples == 0) {
        fail(ErrorKind::InvalidParams, "flow_conjugacy_check needs a positive duration and samples");
    }
    const auto [st0, f0] = ls_forward(q, p, sys);
    const double mu = delaunay_mass(sys);
    const double r0 = st0.y.norm();
    const double omega = mu * mu / (r0 * r0 * r0);
    // Keep consecutive samples well under half a turn so the angle unwraps.
    const auto needed = static_cast<std::size_t>(std::ceil(8.0 * omega * duration / std::numbers::pi));
    const std::size_t n = std::max(n_samples, needed);
    const Vec4 e1 = st0.x;
    const Vec4 e2 = st0.y / r0;

    const OdeSystem kepler = kepler_ode(sys);
    Vec z = concat(q, p);
    double t = 0.0;
    double angle = 0.0;
    double prev_raw = 0.0;
    double max_tau_error = 0.0;
    double orbit = 0.0;
    double tau = 0.0;
    std::vector<double> residuals;
    for (std::size_t k = 1; k <= n; ++k) {
        const double t_next = duration * static_cast<double>(k) / static_cast<double>(n);
        z = propagate(kepler, z, t_next - t, step, Method::RK4);
        t = t_next;
        const DelaunayState img = ls_forward(z.head<3>(), z.tail<3>(), sys).first;
        const double raw = std::atan2(img.x.dot(e2), img.x.dot(e1));
        double delta = raw - prev_raw;
        delta -= 2.0 * std::numbers::pi * std::round(delta / (2.0 * std::numbers::pi));
        angle += delta;
        prev_raw = raw;
        tau = angle / omega;
        const DelaunayState ref = delaunay_exact(st0, mu, tau);
        residuals.push_back((img.flat() - ref.flat()).cwiseAbs().maxCoeff());
        max_tau_error = std::max(max_tau_error, std::abs(tau - t));
        orbit = std::max(orbit, delaunay_orbit_residual(img, st0));
    }
    CheckReport r = summarize("LS flow conjugacy (Kepler vs Delaunay)", residuals, tolerance);
    r.details["measured_rate"] = tau / t;
    r.details["max_tau_minus_t"] = max_tau_error;
    r.details["orbit_residual"] = orbit;
    r.details["duration"] = duration;
    tag(r, sys);
    return r;
}

CheckReport ls_round_trip_audit(const KeplerSystem& sys, std::size_t n_points, std::uint64_t seed, batch::Exec exec,
                                double tolerance)
{
    if (n_points == 0) {
        fail(ErrorKind::InvalidParams, "ls_round_trip_audit needs at least one point");
    }
    Rng rng(seed);
    std::vector<std::pair<Vec3, Vec3>> points;
    for (std::size_t k = 0; k < n_points; ++k) {
        points.push_back(random_sigma_minus(rng, sys));
    }
    const auto res = batch::evaluate(
        n_points,
        [&](std::size_t idx) {
            const auto& [q, p] = points[idx];
            const auto [q1, p1] = ls_inverse(ls_forward(q, p, sys).first, sys);
            return std::max((q1 - q).cwiseAbs().maxCoeff(), (p1 - p).cwiseAbs().maxCoeff());
        },
        exec);
    CheckReport r = summarize("LS round trip ls_inverse(ls_forward(q,p)) = (q,p)", res, tolerance);
    tag(r, sys);
    return r;
}

std::vector<CheckReport> delaunay_dynamics_audit(const KeplerSystem& sys, std::uint64_t seed, double duration,
                                                 double step)
{
    Rng rng(seed);
    const auto [q, p] = random_sigma_minus(rng, sys);
    const DelaunayState st0 = ls_forward(q, p, sys).first;
    const double mu = delaunay_mass(sys);

    IntegratorConfig cfg;
    cfg.method = Method::RK4;
    cfg.step = step;
    const Trajectory traj = integrate(delaunay_ode(mu), st0.flat(), duration, cfg);
    std::vector<CheckReport> out = drift_report(traj, 1e-9);

    std::vector<double> closed_form;
    for (const Sample& s : traj.samples) {
        const DelaunayState exact = delaunay_exact(st0, mu, s.param);
        closed_form.push_back((s.state - exact.flat()).cwiseAbs().maxCoeff());
    }
    CheckReport orbit = summarize("Delaunay flow vs closed-form great circle", closed_form, 1e-8);
    orbit.details["angular_rate"] = mu * mu / std::pow(st0.y.norm(), 3);
    out.push_back(std::move(orbit));

    std::vector<double> dirac;
    std::vector<double> projected;
    std::vector<double> gradients;
    const ScalarField h_star = [mu](const Vec& z) { return dirac_hamiltonian(DelaunayState::from_flat(z), mu); };
    const ScalarField h_proj = [mu](const Vec& z) {
        return dirac_projected_hamiltonian(DelaunayState::from_flat(z), mu);
    };
    for (std::size_t k = 0; k < traj.samples.size(); k += std::max<std::size_t>(1, traj.samples.size() / 20)) {
        const Vec& z = traj.samples[k].state;
        const DelaunayState st = DelaunayState::from_flat(z);
        dirac.push_back(std::abs(dirac_hamiltonian(st, mu) - delaunay_hamiltonian(st, mu)));
        projected.push_back(std::abs(dirac_projected_hamiltonian(st, mu) - dirac_hamiltonian(st, mu)));
        // Hamiltonian vector field of H* against the Delaunay right-hand side.
        const Vec g = gradient(h_star, z);
        const auto [dx, dy] = delaunay_rhs(st, mu);
        Vec field(8);
        field << g.tail<4>(), -g.head<4>();
        Vec rhs(8);
        rhs << dx, dy;
        const Vec gp = gradient(h_proj, z);
        gradients.push_back(std::max((field - rhs).cwiseAbs().maxCoeff(), (gp - g).cwiseAbs().maxCoeff()));
    }
    out.push_back(summarize("Dirac H* = H~ on c1 = c2 = 0", dirac, 1e-10));
    out.push_back(summarize("Dirac H* = projected construction on c1 = c2 = 0", projected, 1e-10));
    out.push_back(summarize("Hamiltonian field of H* = Delaunay field on the surface", gradients, 1e-6));
    for (auto& r : out) {
        r.details["a"] = sys.params.a;
        r.details["delaunay_mass"] = mu;
    }
    return out;
}

}  // namespace kreg
