// Acceptance battery: one PASS/FAIL line per criterion, detail lines indented.
// Usage: kreg_acceptance [criterion ...]  (default: all ten)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "kreg/kappa_phase.hpp"
#include "kreg/kepler.hpp"
#include "kreg/ligon_schaaf.hpp"
#include "kreg/moser.hpp"
#include "kreg/stereo.hpp"

using namespace kreg;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass = true;
    std::vector<std::string> lines;

    void note(const std::string& line) { lines.push_back(line); }

    void require(bool ok, const std::string& line)
    {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + line);
    }

    void require(const CheckReport& r, const std::string& suffix = "")
    {
        char buf[96];
        std::snprintf(buf, sizeof buf, " (max %.3g, tol %.3g)", r.max_residual, r.tolerance);
        require(r.pass, r.identity_name + suffix + buf);
    }
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

const CheckReport& named(const std::vector<CheckReport>& rs, const std::string& name)
{
    for (const auto& r : rs) {
        if (r.identity_name == name) {
            return r;
        }
    }
    std::fprintf(stderr, "missing report '%s'\n", name.c_str());
    std::exit(2);
}

Outcome canonicity()
{
    Outcome o;
    const KappaParams p = KappaParams::make(0.1, 1.0);
    const auto reports = stereo_audit(p, 100, kSeed);
    for (std::size_t k = 0; k < 4; ++k) {
        o.require(reports[k], " [a = 0.1]");
    }
    o.note("info  " + reports[4].identity_name + fmt(" (max %.3g)", reports[4].max_residual));
    o.note("info  " + reports[5].identity_name + fmt(" (max %.3g)", reports[5].max_residual));
    return o;
}

Outcome kappa_brackets()
{
    Outcome o;
    for (double a : {0.0, 0.01, 0.1}) {
        const auto reports = bracket_audit(KappaParams::make(a, 1.0), 100, kSeed);
        const std::string at = fmt(" [a = %g]", a);
        o.require(named(reports, "full {psi^0,psi^i} = a psi^i").max_residual < 1e-6,
                  "full {psi^0,psi^i} = a psi^i" + at + fmt(" (max %.3g, tol 1e-06)",
                                                            named(reports, "full {psi^0,psi^i} = a psi^i").max_residual));
        o.require(named(reports, "full {psi^i,psi^j} = 0").max_residual < 1e-6,
                  "full {psi^i,psi^j} = 0" + at + fmt(" (max %.3g, tol 1e-06)",
                                                      named(reports, "full {psi^i,psi^j} = 0").max_residual));
        const CheckReport& pair = named(reports, "spatial {psi^i,phi^j} = delta_ij");
        if (a > 0.0) {
            const double lambda2 = std::pow(KappaParams::make(a, 1.0).lambda(), 2);
            const bool surfaced = pair.warning.has_value() &&
                                  std::abs(pair.details.at("measured_factor_mean") - lambda2) < 1e-8;
            o.require(surfaced, "{psi^i,phi^j} reported as WARN with factor " +
                                    fmt("%.10g", pair.details.at("measured_factor_mean")) + at);
        } else {
            o.require(!pair.warning && pair.max_residual < 1e-8, "{psi^i,phi^j} = delta_ij exactly" + at);
        }
    }
    return o;
}

Outcome moser_correspondence()
{
    Outcome o;
    for (const auto& r : moser_pipeline_audit(KappaParams{})) {
        o.require(r);
    }
    return o;
}

Outcome regularization()
{
    Outcome o;
    for (const auto& r : regularization_demo(KappaParams{})) {
        o.require(r);
    }
    return o;
}

Outcome so4()
{
    Outcome o;
    for (double a : {0.0, 0.1}) {
        for (const auto& r : so4_audit(KeplerSystem::from_params(KappaParams::make(a, 1.0)), 50, kSeed)) {
            o.require(r, fmt(" [a = %g]", a));
        }
    }
    return o;
}

Outcome intertwining()
{
    Outcome o;
    for (double a : {0.0, 1e-3, 1e-2, 1e-1}) {
        for (const auto& r : intertwine_audit(KeplerSystem::from_params(KappaParams::make(a, 1.0)), 200, kSeed)) {
            o.require(r, fmt(" [a = %g]", a));
        }
    }
    return o;
}

Outcome delaunay()
{
    Outcome o;
    for (double a : {0.0, 0.1}) {
        for (const auto& r : delaunay_dynamics_audit(KeplerSystem::from_params(KappaParams::make(a, 1.0)), kSeed)) {
            o.require(r, fmt(" [a = %g]", a));
        }
    }
    return o;
}

Outcome round_trips()
{
    Outcome o;
    const KappaParams p = KappaParams::make(0.1, 1.0);
    const auto reports = stereo_audit(p, 100, kSeed);
    for (std::size_t k = 7; k < reports.size(); ++k) {
        o.require(reports[k].max_residual < 1e-8,
                  reports[k].identity_name + fmt(" [a = 0.1] (max %.3g, tol 1e-08)", reports[k].max_residual));
    }
    for (double a : {0.0, 0.1}) {
        const CheckReport r = ls_round_trip_audit(KeplerSystem::from_params(KappaParams::make(a, 1.0)), 100, kSeed);
        o.require(r, fmt(" [a = %g]", a));
    }
    return o;
}

// Deformed quantity as a function of a, and its commutative counterpart.
struct Continuity {
    std::string name;
    std::function<Vec(double)> deformed;
    Vec commutative;
};

Vec unit_ls_image(const Vec3& q, const Vec3& p)
{
    const double r = q.norm();
    const double nu = std::sqrt(1.0 / (-2.0 * (0.5 * p.squaredNorm() - 1.0 / r)));
    const double qp = q.dot(p);
    Vec4 A;
    A << q / r - qp * p, qp / nu;
    Vec4 B;
    B << r * p / nu, r * p.squaredNorm() - 1.0;
    const double th = qp / nu;
    return concat(A * std::sin(th) + B * std::cos(th), -nu * A * std::cos(th) + nu * B * std::sin(th));
}

Outcome commutative_limit()
{
    Outcome o;
    const Vec3 q(1.0, 0.2, 0.0);
    const Vec3 p(0.1, 0.8, 0.3);
    const PhasePoint flat_pt(q, p, Chart::Commutative);
    const SphereState s = stereo_inverse(PhasePoint(Vec3(0.4, -0.3, 0.5), Vec3(0.2, 0.7, -1.1), Chart::Commutative));
    const auto params = [](double a) { return KappaParams::make(a, 1.0); };
    const auto system = [&](double a) { return KeplerSystem::from_params(params(a)); };

    std::vector<Continuity> items;
    items.push_back({"realize_spatial", [&](double a) { return realize_spatial(flat_pt, params(a)).flat(); },
                     flat_pt.flat()});
    items.push_back({"kappa_stereo_inverse o realize",
                     [&](double a) { return flat(kappa_stereo_inverse(realize_spatial(flat_pt, params(a)))); },
                     flat(stereo_inverse(flat_pt))});
    items.push_back({"unrealize o kappa_stereo_forward",
                     [&](double a) { return unrealize_spatial(kappa_stereo_forward(s, params(a)), params(a)).flat(); },
                     stereo_forward(s).flat()});
    items.push_back({"(mu~, C~)",
                     [&](double a) {
                         const KeplerSystem k = system(a);
                         return Vec(Eigen::Vector2d(k.mu_tilde, k.c_tilde));
                     },
                     Vec(Eigen::Vector2d(1.0, 1.0))});
    items.push_back({"Kepler H", [&](double a) { return Vec::Constant(1, kepler_hamiltonian(q, p, system(a))); },
                     Vec::Constant(1, 0.5 * p.squaredNorm() - 1.0 / q.norm())});
    items.push_back({"(L, A, B)",
                     [&](double a) {
                         const ConservedSet c = conserved_set(q, p, system(a));
                         Vec out(9);
                         out << c.L, c.A, *c.B;
                         return out;
                     },
                     [&] {
                         const Vec3 L = q.cross(p);
                         const Vec3 A = p.cross(L) - q / q.norm();
                         const double nu = std::sqrt(1.0 / (-2.0 * (0.5 * p.squaredNorm() - 1.0 / q.norm())));
                         Vec out(9);
                         out << L, A, nu * A;
                         return out;
                     }()});
    items.push_back({"ls_forward (p0 = m)", [&](double a) { return ls_forward(q, p, system(a)).first.flat(); },
                     unit_ls_image(q, p)});
    items.push_back({"ls_forward (p0 = 2 m)",
                     [&](double a) {
                         KappaParams k = params(a);
                         k.p0 = 2.0;
                         return ls_forward(q, p, KeplerSystem::from_params(k)).first.flat();
                     },
                     unit_ls_image(q, p)});
    items.push_back({"Kepler H on the realized chart",
                     [&](double a) {
                         const PhasePoint real = realize_spatial(flat_pt, params(a));
                         return Vec::Constant(1, moser_kepler_hamiltonian(
                                                     PhasePoint(real.position(), real.momentum(), Chart::KappaRealized)));
                     },
                     Vec::Constant(1, moser_kepler_hamiltonian(flat_pt))});

    for (const auto& it : items) {
        const Vec base = it.deformed(0.0);
        const double intercept = (base - it.commutative).cwiseAbs().maxCoeff();
        double slopes[3];
        const double as[3] = {1e-4, 1e-3, 1e-2};
        bool finite = true;
        for (int k = 0; k < 3; ++k) {
            slopes[k] = (it.deformed(as[k]) - base).cwiseAbs().maxCoeff() / as[k];
            finite = finite && std::isfinite(slopes[k]);
        }
        const bool constant = slopes[0] == 0.0 && slopes[1] == 0.0 && slopes[2] == 0.0;
        const bool linear = constant || (slopes[1] > 0.0 && std::abs(slopes[0] / slopes[1] - 1.0) < 0.1);
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s: intercept %.3g, K(1e-4, 1e-3, 1e-2) = %.6g, %.6g, %.6g",
                      it.name.c_str(), intercept, slopes[0], slopes[1], slopes[2]);
        o.require(intercept < 1e-10 && finite && linear, buf);
    }
    return o;
}

double circular_error(Method m, double h)
{
    Vec y0(6);
    y0 << 1, 0, 0, 0, 1, 0;
    const Vec end = propagate(kepler_ode(KeplerSystem::unit()), y0, 2.0 * std::numbers::pi, h, m);
    return (end - y0).norm();
}

Outcome integrator_orders()
{
    Outcome o;
    struct Case {
        Method m;
        double h;
        double order;
    };
    for (const Case c : {Case{Method::StormerVerlet, 1e-2, 2.0}, Case{Method::ImplicitMidpoint, 1e-2, 2.0},
                         Case{Method::RK4, 5e-2, 4.0}}) {
        const double e1 = circular_error(c.m, c.h);
        const double e2 = circular_error(c.m, c.h / 2);
        const double ratio = e1 / e2;
        const double nominal = std::pow(2.0, c.order);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: error ratio %.4g (order %.3f), nominal %.0f", std::string(to_string(c.m)).c_str(),
                      ratio, std::log2(ratio), nominal);
        o.require(ratio > nominal / 1.5 && ratio < nominal * 1.5, buf);
    }
    return o;
}

struct Criterion {
    const char* title;
    double budget_s;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"canonicity of stereographic maps", 10, canonicity},
    {"kappa bracket relations", 10, kappa_brackets},
    {"Moser correspondence", 30, moser_correspondence},
    {"regularization demo", 30, regularization},
    {"so(4) closure", 60, so4},
    {"LS intertwining", 30, intertwining},
    {"Delaunay dynamics", 20, delaunay},
    {"round trips", 60, round_trips},
    {"commutative-limit continuity", 60, commutative_limit},
    {"integrator order", 60, integrator_orders},
};

}  // namespace

int main(int argc, char** argv)
{
    std::vector<int> which;
    for (int k = 1; k < argc; ++k) {
        const int n = std::atoi(argv[k]);
        if (n < 1 || n > 10) {
            std::fprintf(stderr, "usage: %s [criterion 1-10 ...]\n", argv[0]);
            return 2;
        }
        which.push_back(n);
    }
    if (which.empty()) {
        for (int n = 1; n <= 10; ++n) {
            which.push_back(n);
        }
    }
    bool all = true;
    for (int n : which) {
        const Criterion& c = kCriteria[n - 1];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o = c.run();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs < c.budget_s, fmt("runtime %.2f s", secs) + fmt(" (budget %.0f s)", c.budget_s));
        std::printf("criterion %2d  %s  %s\n", n, o.pass ? "PASS" : "FAIL", c.title);
        for (const auto& line : o.lines) {
            std::printf("    %s\n", line.c_str());
        }
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
