#include "kreg/stereo.hpp"

#include <cmath>

#include "kreg/error.hpp"

namespace kreg {

double SphereState::constraint_residual() const
{
    return std::max(std::abs(u.norm() - 1.0), std::abs(u.dot(v)));
}

void SphereState::validate(double tol) const
{
    if (u.size() != v.size() || (u.size() != 3 && u.size() != 4)) {
        fail(ErrorKind::InvalidState, "sphere states carry d+1 = 3 or 4 components");
    }
    if (!u.allFinite() || !v.allFinite()) {
        fail(ErrorKind::InvalidState, "sphere state is not finite");
    }
    if (constraint_residual() > tol) {
        fail(ErrorKind::InvalidState, "sphere state violates |u| = 1 or <u,v> = 0");
    }
}

namespace {

PhasePoint project(const SphereState& s, Chart chart)
{
    const Eigen::Index d = s.dim();
    const double un = s.u[d];
    if (!(un < 1.0 - kPoleGuard)) {
        fail(ErrorKind::PoleSingularity, "stereographic projection at the north pole");
    }
    const double gap = 1.0 - un;
    const Vec up = s.u.head(d);
    return PhasePoint(up / gap, s.v.head(d) * gap + s.v[d] * up, chart);
}

SphereState lift(const PhasePoint& pt)
{
    const Vec& X = pt.position();
    const Vec& Y = pt.momentum();
    const Eigen::Index d = X.size();
    const double x2 = X.squaredNorm();
    const double xy = X.dot(Y);
    SphereState s{Vec(d + 1), Vec(d + 1)};
    s.u.head(d) = 2.0 * X / (x2 + 1.0);
    s.u[d] = (x2 - 1.0) / (x2 + 1.0);
    s.v.head(d) = 0.5 * (x2 + 1.0) * Y - xy * X;
    s.v[d] = xy;
    return s;
}

}  // namespace

PhasePoint stereo_forward(const SphereState& s) { return project(s, Chart::Commutative); }

SphereState stereo_inverse(const PhasePoint& pt) { return lift(pt.require(Chart::Commutative)); }

PhasePoint kappa_stereo_forward(const SphereState& s, const KappaParams& params)
{
    params.validate();
    return project(s, Chart::KappaRealized);
}

SphereState kappa_stereo_inverse(const PhasePoint& pt) { return lift(pt.require(Chart::KappaRealized)); }

SphereChart choose_chart(const Vec& u)
{
    Eigen::Index j = 0;
    u.cwiseAbs().maxCoeff(&j);
    return SphereChart{j, u[j] >= 0.0 ? 1.0 : -1.0, u.size()};
}

Vec to_chart(const SphereState& s, const SphereChart& chart)
{
    const Eigen::Index n = chart.ambient;
    const Eigen::Index j = chart.dropped;
    Vec out(2 * (n - 1));
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i == j) {
            continue;
        }
        out[k] = s.u[i];
        out[n - 1 + k] = s.v[i] - s.v[j] * s.u[i] / s.u[j];
        ++k;
    }
    return out;
}

SphereState from_chart(const Vec& coords, const SphereChart& chart)
{
    const Eigen::Index n = chart.ambient;
    const Eigen::Index j = chart.dropped;
    const Vec q = coords.head(n - 1);
    const Vec w = coords.tail(n - 1);
    const double rest = 1.0 - q.squaredNorm();
    if (!(rest > 0.0)) {
        fail(ErrorKind::InvalidState, "chart coordinates leave the sphere");
    }
    SphereState s{Vec(n), Vec(n)};
    const double uj = chart.sign * std::sqrt(rest);
    // Tangency fixes v_j = -u_j <u', w> on the unit sphere.
    const double vj = -uj * q.dot(w);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i == j) {
            s.u[i] = uj;
            s.v[i] = vj;
            continue;
        }
        s.u[i] = q[k];
        s.v[i] = w[k] + vj * q[k] / uj;
        ++k;
    }
    return s;
}

Mat symplectic_matrix(Eigen::Index n)
{
    Mat omega = Mat::Zero(2 * n, 2 * n);
    omega.topRightCorner(n, n) = Mat::Identity(n, n);
    omega.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return omega;
}

double symplectic_residual(const VectorMap& map, const Vec& z, double h)
{
    const Mat J = jacobian(map, z, h);
    if (J.rows() != J.cols() || J.rows() % 2 != 0) {
        fail(ErrorKind::InvalidState, "symplectic check needs a map between equal even dimensions");
    }
    const Mat omega = symplectic_matrix(J.rows() / 2);
    return (J.transpose() * omega * J - omega).cwiseAbs().maxCoeff();
}

CheckReport symplectic_check(const VectorMap& map, const Vec& z, double h, std::string name, double tolerance)
{
    const double r = symplectic_residual(map, z, h);
    return summarize(std::move(name), std::span<const double>(&r, 1), tolerance);
}

SphereState random_sphere_state(Rng& rng, Eigen::Index d, double max_un, double speed)
{
    for (;;) {
        Vec u = rng.normal_vec(d + 1);
        u.normalize();
        if (u[d] > max_un) {
            continue;
        }
        Vec v = rng.normal_vec(d + 1);
        v -= v.dot(u) * u;
        if (speed > 0.0) {
            v *= speed / v.norm();
        }
        return SphereState{u, v};
    }
}

namespace {

constexpr double kCanonTol = 1e-6;
constexpr double kRoundTripTol = 1e-10;
constexpr Eigen::Index kDim = 3;

std::vector<double> column(const std::vector<double>& rows, std::size_t width, std::size_t c)
{
    std::vector<double> out(rows.size() / width);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = rows[width * k + c];
    }
    return out;
}

double conformal_residual(const VectorMap& map, const Vec& z, double factor)
{
    const Mat J = jacobian(map, z);
    const Mat omega = symplectic_matrix(J.rows() / 2);
    return (J.transpose() * omega * J - factor * omega).cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<CheckReport> stereo_audit(const KappaParams& params, std::size_t n_points, std::uint64_t seed,
                                      batch::Exec exec)
{
    params.validate();
    if (n_points == 0) {
        fail(ErrorKind::InvalidParams, "stereo_audit needs at least one point");
    }
    Rng rng(seed);
    std::vector<Vec> flat_pts;
    std::vector<SphereState> sphere_pts;
    for (std::size_t k = 0; k < n_points; ++k) {
        flat_pts.push_back(random_phase_vector(rng, kDim));
    }
    for (std::size_t k = 0; k < n_points; ++k) {
        sphere_pts.push_back(random_sphere_state(rng, kDim));
    }
    const double lambda2 = params.lambda() * params.lambda();

    constexpr std::size_t width = 12;
    const auto rows = batch::evaluate_rows(
        n_points, width,
        [&](std::size_t k, double* row) {
            const Vec& z = flat_pts[k];
            const SphereState& s = sphere_pts[k];

            // (X, Y) -> sphere chart, chart frozen at the base image.
            const SphereChart out_chart = choose_chart(stereo_inverse(PhasePoint::from_flat(z, Chart::Commutative)).u);
            const VectorMap inv = [&](const Vec& w) {
                return to_chart(stereo_inverse(PhasePoint::from_flat(w, Chart::Commutative)), out_chart);
            };
            const SphereChart in_chart = choose_chart(s.u);
            const Vec c = to_chart(s, in_chart);
            const VectorMap fwd = [&](const Vec& w) { return stereo_forward(from_chart(w, in_chart)).flat(); };

            // Composites through the realization, as maps of commutative variables.
            const SphereChart k_chart =
                choose_chart(kappa_stereo_inverse(realize_spatial(PhasePoint::from_flat(z, Chart::Commutative), params)).u);
            const VectorMap k_inv = [&](const Vec& w) {
                const PhasePoint real = realize_spatial(PhasePoint::from_flat(w, Chart::Commutative), params);
                return to_chart(kappa_stereo_inverse(real), k_chart);
            };
            const VectorMap k_fwd = [&](const Vec& w) {
                return unrealize_spatial(kappa_stereo_forward(from_chart(w, in_chart), params), params).flat();
            };

            row[0] = symplectic_residual(inv, z);
            row[1] = symplectic_residual(fwd, c);
            row[2] = symplectic_residual(k_inv, z);
            row[3] = symplectic_residual(k_fwd, c);
            row[4] = conformal_residual(k_inv, z, lambda2);
            row[5] = conformal_residual(k_fwd, c, 1.0 / lambda2);

            const PhasePoint pt = PhasePoint::from_flat(z, Chart::Commutative);
            const SphereState lifted = stereo_inverse(pt);
            row[6] = lifted.constraint_residual();
            row[7] = stereo_forward(lifted).max_abs_diff(pt);
            const SphereState back = stereo_inverse(stereo_forward(s));
            row[8] = std::max((back.u - s.u).cwiseAbs().maxCoeff(), (back.v - s.v).cwiseAbs().maxCoeff());

            const PhasePoint real = realize_spatial(pt, params);
            row[9] = kappa_stereo_forward(kappa_stereo_inverse(real), params).max_abs_diff(real);
            const SphereState kback = kappa_stereo_inverse(kappa_stereo_forward(s, params));
            row[10] = std::max((kback.u - s.u).cwiseAbs().maxCoeff(), (kback.v - s.v).cwiseAbs().maxCoeff());
            row[11] = unrealize_spatial(real, params).max_abs_diff(pt);
        },
        exec);

    struct Spec {
        const char* name;
        double tol;
    };
    const Spec specs[width] = {
        {"stereo_inverse canonical |J^T Omega J - Omega|", kCanonTol},
        {"stereo_forward canonical |J^T Omega J - Omega|", kCanonTol},
        {"kappa_stereo_inverse o realize canonical |J^T Omega J - Omega|", kCanonTol},
        {"unrealize o kappa_stereo_forward canonical |J^T Omega J - Omega|", kCanonTol},
        {"kappa_stereo_inverse o realize conformal |J^T Omega J - lambda^2 Omega|", kCanonTol},
        {"unrealize o kappa_stereo_forward conformal |J^T Omega J - lambda^-2 Omega|", kCanonTol},
        {"stereo_inverse lands on |u| = 1, <u,v> = 0", kRoundTripTol},
        {"stereo_forward o stereo_inverse = id", kRoundTripTol},
        {"stereo_inverse o stereo_forward = id", kRoundTripTol},
        {"kappa_stereo_forward o kappa_stereo_inverse = id", kRoundTripTol},
        {"kappa_stereo_inverse o kappa_stereo_forward = id", kRoundTripTol},
        {"unrealize o realize = id", 1e-12},
    };
    std::vector<CheckReport> out;
    for (std::size_t c = 0; c < width; ++c) {
        CheckReport r = summarize(specs[c].name, column(rows, width, c), specs[c].tol);
        r.details["a"] = params.a;
        r.details["lambda_squared"] = lambda2;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace kreg
