#include "kreg/kappa_phase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "kreg/error.hpp"
#include "kreg/poisson.hpp"
#include "kreg/sampling.hpp"

namespace kreg {

void KappaParams::validate() const
{
    const bool finite = std::isfinite(a) && std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(p0) &&
                        std::isfinite(m) && std::isfinite(C);
    if (!finite) {
        fail(ErrorKind::InvalidParams, "deformation parameters must be finite");
    }
    if (a < 0.0) {
        fail(ErrorKind::InvalidParams, "deformation parameter a must be >= 0");
    }
    if (!(m > 0.0) || !(C > 0.0)) {
        fail(ErrorKind::InvalidParams, "mass m and coupling C must be positive");
    }
}

KappaParams KappaParams::make(double a, double alpha, double m, double C, double beta)
{
    KappaParams p{a, alpha, beta, m, m, C};
    p.validate();
    return p;
}

std::string_view to_string(Chart chart) noexcept
{
    switch (chart) {
    case Chart::Commutative: return "commutative";
    case Chart::KappaRealized: return "kappa";
    case Chart::Kepler: return "kepler";
    case Chart::SpherePulled: return "sphere-pulled";
    }
    return "unknown";
}

Chart chart_from_string(std::string_view name)
{
    for (Chart c : {Chart::Commutative, Chart::KappaRealized, Chart::Kepler, Chart::SpherePulled}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    fail(ErrorKind::Usage, "unknown chart '" + std::string(name) + "'");
}

PhasePoint::PhasePoint(Vec position, Vec momentum, Chart chart)
    : position_(std::move(position)), momentum_(std::move(momentum)), chart_(chart)
{
    if (position_.size() != momentum_.size()) {
        fail(ErrorKind::InvalidState, "position and momentum dimensions differ");
    }
    if (position_.size() != 2 && position_.size() != 3) {
        fail(ErrorKind::InvalidState, "phase points live in d = 2 or 3 dimensions");
    }
}

PhasePoint PhasePoint::from_flat(const Vec& z, Chart chart)
{
    const Eigen::Index d = z.size() / 2;
    if (z.size() != 2 * d) {
        fail(ErrorKind::InvalidState, "flat phase vector must have even length");
    }
    return PhasePoint(z.head(d), z.tail(d), chart);
}

const PhasePoint& PhasePoint::require(Chart expected) const
{
    if (chart_ != expected) {
        std::ostringstream msg;
        msg << "expected a point in the " << to_string(expected) << " chart, got " << to_string(chart_);
        fail(ErrorKind::ChartMismatch, msg.str());
    }
    return *this;
}

double PhasePoint::max_abs_diff(const PhasePoint& other) const
{
    other.require(chart_);
    if (other.dim() != dim()) {
        fail(ErrorKind::InvalidState, "dimension mismatch");
    }
    return std::max((position_ - other.position_).cwiseAbs().maxCoeff(),
                    (momentum_ - other.momentum_).cwiseAbs().maxCoeff());
}

FullPhasePoint FullPhasePoint::from_flat(const Vec& z)
{
    const Eigen::Index n = z.size() / 2;
    return FullPhasePoint{z.head(n), z.tail(n)};
}

PhasePoint realize_spatial(const PhasePoint& pt, const KappaParams& params)
{
    pt.require(Chart::Commutative);
    const double lambda = params.lambda();
    return PhasePoint(lambda * pt.position(), lambda * pt.momentum(), Chart::KappaRealized);
}

PhasePoint unrealize_spatial(const PhasePoint& pt, const KappaParams& params)
{
    pt.require(Chart::KappaRealized);
    const double lambda = params.lambda();
    if (std::abs(lambda) < 1e-14) {
        fail(ErrorKind::InvalidParams, "realization is singular: 1 + alpha a p0 = 0");
    }
    return PhasePoint(pt.position() / lambda, pt.momentum() / lambda, Chart::Commutative);
}

namespace {

double time_dot(const Vec& u, const Vec& w, Metric metric)
{
    const double spatial = u.tail(u.size() - 1).dot(w.tail(w.size() - 1));
    switch (metric) {
    case Metric::Euclidean: return u[0] * w[0] + spatial;
    case Metric::MostlyMinus: return u[0] * w[0] - spatial;
    case Metric::MostlyPlus: return -u[0] * w[0] + spatial;
    }
    return 0.0;
}

}  // namespace

FullPhasePoint realize_full(const FullPhasePoint& fp, double a, const RealizationCoefficients& c, Metric metric)
{
    if (fp.x.size() != fp.p.size() || (fp.x.size() != 3 && fp.x.size() != 4)) {
        fail(ErrorKind::InvalidState, "full phase points carry d+1 = 3 or 4 components");
    }
    // a^mu = (a, 0, ..., 0), so (a.p) = a p^0 and (a.x) = a x^0.
    const double a_p = a * fp.p[0];
    const double a_x = a * fp.x[0];
    const double x_p = time_dot(fp.x, fp.p, metric);
    const double p_p = time_dot(fp.p, fp.p, metric);

    FullPhasePoint out{fp.x + c.alpha * a_p * fp.x + c.beta * a_x * fp.p,
                       fp.p + (c.alpha + c.beta) * a_p * fp.p};
    out.x[0] += c.gamma * a * x_p;
    out.p[0] += c.gamma * a * p_p;
    return out;
}

FullPhasePoint realize_full(const FullPhasePoint& fp, const KappaParams& params, Metric metric)
{
    return realize_full(fp, params.a, RealizationCoefficients{params.alpha, params.beta, params.gamma()}, metric);
}

namespace {

constexpr double kSpatialTol = 1e-8;
constexpr double kFullTol = 1e-6;
constexpr int kD = 3;

ScalarField component(std::function<Vec(const Vec&)> map, Eigen::Index i)
{
    return [map = std::move(map), i](const Vec& z) { return map(z)[i]; };
}

/// Reports the claimed {psi^i, phi^j} = delta_ij against the measured factor.
CheckReport canonical_pair_report(std::string name, const std::vector<double>& rows, std::size_t n, double tol)
{
    // rows: [residual vs delta, residual vs lambda^2 delta, measured diagonal, lambda^2]
    std::vector<double> vs_delta(n), vs_lambda(n);
    double diag_sum = 0.0;
    double lambda_sq_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        vs_delta[k] = rows[4 * k + 0];
        vs_lambda[k] = rows[4 * k + 1];
        diag_sum += rows[4 * k + 2];
        lambda_sq_sum += rows[4 * k + 3];
    }
    CheckReport r = summarize(std::move(name), vs_delta, tol);
    const CheckReport scaled = summarize("scaled", vs_lambda, tol);
    const double measured = diag_sum / static_cast<double>(n);
    r.details["measured_factor_mean"] = measured;
    r.details["lambda_squared_mean"] = lambda_sq_sum / static_cast<double>(n);
    r.details["max_residual_vs_lambda_squared"] = scaled.max_residual;
    if (!r.pass && scaled.pass) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "bracket is lambda^2 delta_ij, not delta_ij: measured factor " << measured
            << " (lambda = 1 + alpha a p0); the realization scales both x and p";
        r.warning = msg.str();
        r.pass = true;
    }
    return r;
}

}  // namespace

std::vector<CheckReport> bracket_audit(const KappaParams& params, std::size_t n_points, std::uint64_t seed,
                                       batch::Exec exec)
{
    params.validate();
    if (n_points == 0) {
        fail(ErrorKind::InvalidParams, "bracket_audit needs at least one point");
    }
    Rng rng(seed);
    std::vector<Vec> spatial_pts;
    std::vector<Vec> full_pts;
    for (std::size_t k = 0; k < n_points; ++k) {
        spatial_pts.push_back(random_phase_vector(rng, kD));
    }
    for (std::size_t k = 0; k < n_points; ++k) {
        Vec x = rng.uniform_vec(kD + 1, -kSampleBox, kSampleBox);
        Vec p = rng.uniform_vec(kD + 1, -kSampleBox, kSampleBox);
        while (p.tail(kD).norm() < kMinMomentum) {
            p = rng.uniform_vec(kD + 1, -kSampleBox, kSampleBox);
        }
        full_pts.push_back(concat(x, p));
    }

    const double lambda = params.lambda();
    const auto spatial_psi = [lambda](const Vec& z) -> Vec { return lambda * z.head(kD); };
    const auto spatial_phi = [lambda](const Vec& z) -> Vec { return lambda * z.tail(kD); };
    const auto full_psi = [params](const Vec& z) -> Vec { return realize_full(FullPhasePoint::from_flat(z), params).x; };
    const auto full_phi = [params](const Vec& z) -> Vec { return realize_full(FullPhasePoint::from_flat(z), params).p; };

    // Spatial interpretation: p0 frozen, phase space (x^i, p^i).
    constexpr std::size_t width = 7;
    const auto spatial_rows = batch::evaluate_rows(
        n_points, width,
        [&](std::size_t k, double* row) {
            const Vec& z = spatial_pts[k];
            double psi_psi = 0.0, phi_phi = 0.0, vs_delta = 0.0, vs_lambda = 0.0, diag = 0.0;
            for (int i = 0; i < kD; ++i) {
                for (int j = 0; j < kD; ++j) {
                    psi_psi = std::max(psi_psi, std::abs(poisson_bracket(component(spatial_psi, i),
                                                                         component(spatial_psi, j), z)));
                    phi_phi = std::max(phi_phi, std::abs(poisson_bracket(component(spatial_phi, i),
                                                                         component(spatial_phi, j), z)));
                    const double b = poisson_bracket(component(spatial_psi, i), component(spatial_phi, j), z);
                    const double delta = i == j ? 1.0 : 0.0;
                    vs_delta = std::max(vs_delta, std::abs(b - delta));
                    vs_lambda = std::max(vs_lambda, std::abs(b - lambda * lambda * delta));
                    if (i == j) {
                        diag += b / kD;
                    }
                }
            }
            row[0] = psi_psi;
            row[1] = phi_phi;
            row[2] = vs_delta;
            row[3] = vs_lambda;
            row[4] = diag;
            row[5] = lambda * lambda;
            row[6] = 0.0;
        },
        exec);

    // Full interpretation: p^0 is a phase variable, brackets on the 2(d+1) space.
    const double a = params.a;
    const auto full_rows = batch::evaluate_rows(
        n_points, width,
        [&](std::size_t k, double* row) {
            const Vec& z = full_pts[k];
            const Vec psi = full_psi(z);
            const double lam = 1.0 + params.alpha * a * z[kD + 1];
            double time_rel = 0.0, psi_psi = 0.0, phi_phi = 0.0, vs_delta = 0.0, vs_lambda = 0.0, diag = 0.0;
            for (int i = 1; i <= kD; ++i) {
                const double b0i = poisson_bracket(component(full_psi, 0), component(full_psi, i), z);
                time_rel = std::max(time_rel, std::abs(b0i - a * psi[i]));
                for (int j = 1; j <= kD; ++j) {
                    psi_psi = std::max(psi_psi, std::abs(poisson_bracket(component(full_psi, i),
                                                                         component(full_psi, j), z)));
                    phi_phi = std::max(phi_phi, std::abs(poisson_bracket(component(full_phi, i),
                                                                         component(full_phi, j), z)));
                    const double b = poisson_bracket(component(full_psi, i), component(full_phi, j), z);
                    const double delta = i == j ? 1.0 : 0.0;
                    vs_delta = std::max(vs_delta, std::abs(b - delta));
                    vs_lambda = std::max(vs_lambda, std::abs(b - lam * lam * delta));
                    if (i == j) {
                        diag += b / kD;
                    }
                }
            }
            row[0] = psi_psi;
            row[1] = phi_phi;
            row[2] = vs_delta;
            row[3] = vs_lambda;
            row[4] = diag;
            row[5] = lam * lam;
            row[6] = time_rel;
        },
        exec);

    auto column = [n_points](const std::vector<double>& rows, std::size_t c) {
        std::vector<double> out(n_points);
        for (std::size_t k = 0; k < n_points; ++k) {
            out[k] = rows[width * k + c];
        }
        return out;
    };
    auto pair_rows = [&](const std::vector<double>& rows) {
        std::vector<double> out;
        for (std::size_t k = 0; k < n_points; ++k) {
            for (std::size_t c = 2; c <= 5; ++c) {
                out.push_back(rows[width * k + c]);
            }
        }
        return out;
    };

    std::vector<CheckReport> reports;
    reports.push_back(summarize("spatial {psi^i,psi^j} = 0", column(spatial_rows, 0), kSpatialTol));
    reports.push_back(summarize("spatial {phi^i,phi^j} = 0", column(spatial_rows, 1), kSpatialTol));
    reports.push_back(canonical_pair_report("spatial {psi^i,phi^j} = delta_ij", pair_rows(spatial_rows), n_points, kSpatialTol));
    reports.push_back(summarize("full {psi^0,psi^i} = a psi^i", column(full_rows, 6), kFullTol));
    reports.push_back(summarize("full {psi^i,psi^j} = 0", column(full_rows, 0), kFullTol));
    reports.push_back(summarize("full {phi^i,phi^j} = 0", column(full_rows, 1), kFullTol));
    reports.push_back(canonical_pair_report("full {psi^i,phi^j} = delta_ij", pair_rows(full_rows), n_points, kFullTol));
    for (auto& r : reports) {
        r.details["a"] = params.a;
        r.details["alpha"] = params.alpha;
    }
    return reports;
}

}  // namespace kreg
