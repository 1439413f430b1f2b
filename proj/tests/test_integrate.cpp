#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kreg/error.hpp"
#include "kreg/integrate.hpp"
#include "kreg/kepler.hpp"
#include "kreg/moser.hpp"
#include "kreg/sampling.hpp"

using namespace kreg;

namespace {

OdeSystem oscillator()
{
    OdeSystem ode;
    ode.separable = true;
    ode.rhs = [](const Vec& y) {
        Vec d(2);
        d << y[1], -y[0];
        return d;
    };
    ode.monitor = [](const Vec& y) { return 0.5 * y.squaredNorm(); };
    ode.invariant_names = {"H"};
    ode.invariants = [](const Vec& y) {
        Vec out(1);
        out << 0.5 * y.squaredNorm();
        return out;
    };
    return ode;
}

Vec unit_state()
{
    Vec y(2);
    y << 1.0, 0.0;
    return y;
}

IntegratorConfig config(Method m, double step)
{
    IntegratorConfig c;
    c.method = m;
    c.step = step;
    return c;
}

double circular_error(Method m, double h)
{
    Vec y0(6);
    y0 << 1, 0, 0, 0, 1, 0;
    const Vec end = propagate(kepler_ode(KeplerSystem::unit()), y0, 2.0 * std::numbers::pi, h, m);
    return (end - y0).norm();
}

}  // namespace

TEST_SUITE("integrate")
{
    TEST_CASE("method names")
    {
        for (Method m : {Method::StormerVerlet, Method::ImplicitMidpoint, Method::RK4}) {
            CHECK(method_from_string(to_string(m)) == m);
        }
        CHECK_THROWS_AS(method_from_string("euler"), Error);
    }

    TEST_CASE("config validation")
    {
        IntegratorConfig c;
        c.step = 1e-12;
        CHECK_THROWS_AS(c.validate(), Error);
        c = IntegratorConfig{};
        c.tolerance = 0.0;
        CHECK_THROWS_AS(c.validate(), Error);
        CHECK_THROWS_AS(integrate(oscillator(), unit_state(), -1.0, IntegratorConfig{}), Error);
        Vec bad = unit_state();
        bad[0] = std::nan("");
        CHECK_THROWS_AS(integrate(oscillator(), bad, 1.0, IntegratorConfig{}), Error);
        OdeSystem ns = oscillator();
        ns.separable = false;
        CHECK_THROWS_AS(integrate(ns, unit_state(), 1.0, config(Method::StormerVerlet, 1e-3)), Error);
    }

    TEST_CASE("harmonic oscillator energy with RK4 over duration 100")
    {
        const Trajectory traj = integrate(oscillator(), unit_state(), 100.0, config(Method::RK4, 1e-3));
        CHECK(traj.termination == Termination::Completed);
        CHECK(traj.final_param() == 100.0);
        const auto r = drift_report(traj, 1e-8);
        REQUIRE(r.size() == 1);
        CHECK(r[0].pass);
        CHECK(std::abs(traj.samples.back().state[0] - std::cos(100.0)) < 1e-9);
    }

    TEST_CASE("implicit midpoint conserves quadratic energy")
    {
        const Trajectory traj = integrate(oscillator(), unit_state(), 20.0, config(Method::ImplicitMidpoint, 1e-2));
        CHECK(drift_report(traj, 1e-12)[0].pass);
    }

    TEST_CASE("parameters strictly increase and land on the end")
    {
        const Trajectory traj = integrate(oscillator(), unit_state(), 1.0, config(Method::RK4, 0.3));
        REQUIRE(traj.samples.size() == 5);
        for (std::size_t k = 1; k < traj.samples.size(); ++k) {
            CHECK(traj.samples[k].param > traj.samples[k - 1].param);
        }
        CHECK(traj.final_param() == 1.0);
    }

    TEST_CASE("circular Kepler orbit with Verlet keeps the radius per period")
    {
        Vec y0(6);
        y0 << 1, 0, 0, 0, 1, 0;
        const Trajectory traj =
            integrate(kepler_ode(KeplerSystem::unit()), y0, 2 * std::numbers::pi, config(Method::StormerVerlet, 1e-3));
        double drift = 0.0;
        for (const auto& s : traj.samples) {
            drift = std::max(drift, std::abs(s.state.head(3).norm() - 1.0));
        }
        CHECK(drift < 1e-6);
    }

    TEST_CASE("convergence orders on the circular orbit")
    {
        struct Case {
            Method m;
            double h;
            double nominal;
        };
        for (const Case c : {Case{Method::StormerVerlet, 1e-2, 4.0}, Case{Method::ImplicitMidpoint, 1e-2, 4.0},
                             Case{Method::RK4, 5e-2, 16.0}}) {
            const double ratio = circular_error(c.m, c.h) / circular_error(c.m, c.h / 2);
            CHECK_MESSAGE(ratio > c.nominal / 1.5, to_string(c.m) << " ratio " << ratio);
            CHECK_MESSAGE(ratio < c.nominal * 1.5, to_string(c.m) << " ratio " << ratio);
        }
    }

    TEST_CASE("radial orbit stops before the origin")
    {
        Vec y0(6);
        y0 << 1, 0, 0, 0, 0, 0;
        for (double tol : {1e-6, 1e-10}) {
            IntegratorConfig c = config(Method::StormerVerlet, 1e-3);
            c.adaptive = true;
            c.tolerance = tol;
            const Trajectory traj = integrate(kepler_ode(KeplerSystem::unit()), y0, 5.0, c);
            CHECK((traj.termination == Termination::Collision || traj.termination == Termination::MinStepReached));
            CHECK_FALSE(traj.termination_detail.empty());
            for (const auto& s : traj.samples) {
                CHECK(s.state.allFinite());
                CHECK(s.state.head(3).norm() > 0.0);
            }
        }
    }

    TEST_CASE("singular fixed-step runs end as collisions")
    {
        OdeSystem ode = oscillator();
        ode.rhs = [](const Vec& y) {
            if (y[0] < 0.5) {
                fail(ErrorKind::Collision, "wall");
            }
            Vec d(2);
            d << -1.0, 0.0;
            return d;
        };
        const Trajectory traj = integrate(ode, unit_state(), 2.0, config(Method::RK4, 0.1));
        CHECK(traj.termination == Termination::Collision);
        CHECK(traj.final_param() < 1.0);
    }

    TEST_CASE("non-finite states end the run")
    {
        OdeSystem ode = oscillator();
        ode.rhs = [](const Vec& y) { return Vec(y * std::numeric_limits<double>::infinity()); };
        const Trajectory traj = integrate(ode, unit_state(), 1.0, config(Method::RK4, 0.1));
        CHECK(traj.termination == Termination::NonFinite);
        CHECK(traj.samples.size() == 1);
    }

    TEST_CASE("projected sphere integration stays on the constraint surface")
    {
        Rng rng(5);
        const SphereState s0 = random_sphere_state(rng, 3, 0.9, 1.0);
        IntegratorConfig c = config(Method::ImplicitMidpoint, 1e-2);
        c.projection = true;
        const Trajectory traj = integrate(sphere_ode(3), flat(s0), 50.0, c);
        for (const auto& s : traj.samples) {
            CHECK(std::abs(s.invariants[1]) < 1e-12);
            CHECK(std::abs(s.invariants[2]) < 1e-12);
        }
    }

    TEST_CASE("sphere great circle closes after 2 pi")
    {
        Rng rng(6);
        const SphereState s0 = random_sphere_state(rng, 3, 0.9, 1.0);
        IntegratorConfig c = config(Method::ImplicitMidpoint, 1e-3);
        c.projection = true;
        const Trajectory traj = integrate(sphere_ode(3), flat(s0), 2 * std::numbers::pi, c);
        CHECK((traj.samples.back().state - flat(s0)).cwiseAbs().maxCoeff() < 1e-6);
    }

    TEST_CASE("identical inputs give bit-identical trajectories")
    {
        Vec y0(6);
        y0 << 1, 0.1, 0, 0, 0.8, 0.2;
        IntegratorConfig c = config(Method::StormerVerlet, 1e-2);
        c.adaptive = true;
        const Trajectory a = integrate(kepler_ode(KeplerSystem::unit()), y0, 5.0, c);
        const Trajectory b = integrate(kepler_ode(KeplerSystem::unit()), y0, 5.0, c);
        REQUIRE(a.samples.size() == b.samples.size());
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            CHECK(a.samples[k].param == b.samples[k].param);
            CHECK((a.samples[k].state.array() == b.samples[k].state.array()).all());
        }
    }

    TEST_CASE("drift report")
    {
        const Trajectory traj = integrate(oscillator(), unit_state(), 1.0, config(Method::RK4, 0.1));
        const auto r = drift_report(traj, {{"const", [](const Vec&) { return 3.0; }}, {"q", [](const Vec& y) { return y[0]; }}},
                                    1e-3);
        REQUIRE(r.size() == 2);
        CHECK(r[0].max_residual == 0.0);
        CHECK(r[0].pass);
        CHECK(r[1].max_residual == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-6));
        CHECK(r[1].details.at("terminal_drift") == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-6));
        CHECK_FALSE(r[1].pass);
    }

    TEST_CASE("adaptive control halves on drift and recovers")
    {
        Vec y0(6);
        y0 << 1, 0, 0, 0, 1.3, 0;
        IntegratorConfig c = config(Method::StormerVerlet, 1e-2);
        c.adaptive = true;
        c.tolerance = 1e-9;
        const Trajectory traj = integrate(kepler_ode(KeplerSystem::unit()), y0, 10.0, c);
        CHECK(traj.termination == Termination::Completed);
        double smallest = 1.0;
        double largest = 0.0;
        for (std::size_t k = 1; k < traj.samples.size(); ++k) {
            const double h = traj.samples[k].param - traj.samples[k - 1].param;
            smallest = std::min(smallest, h);
            largest = std::max(largest, h);
        }
        CHECK(smallest < 1e-2);
        CHECK(largest == doctest::Approx(1e-2));
    }
}
