#include <doctest.h>

#include <cmath>

#include "kreg/error.hpp"
#include "kreg/kappa_phase.hpp"
#include "kreg/poisson.hpp"
#include "kreg/sampling.hpp"

using namespace kreg;

namespace {

Vec vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) {
        v[k++] = x;
    }
    return v;
}

const CheckReport& find(const std::vector<CheckReport>& rs, const std::string& name)
{
    for (const auto& r : rs) {
        if (r.identity_name == name) {
            return r;
        }
    }
    FAIL("no report named " << name);
    return rs.front();
}

}  // namespace

TEST_SUITE("kappa_phase")
{
    TEST_CASE("params validation and derived constants")
    {
        const KappaParams p = KappaParams::make(0.1, 1.0, 2.0);
        CHECK(p.p0 == 2.0);
        CHECK(p.gamma() == 0.0);
        CHECK(p.lambda() == doctest::Approx(1.2).epsilon(1e-15));
        CHECK_THROWS_AS(KappaParams::make(-0.1, 1.0), Error);
        CHECK_THROWS_AS(KappaParams::make(0.1, 1.0, 0.0), Error);
        KappaParams bad;
        bad.C = std::nan("");
        CHECK_THROWS_AS(bad.validate(), Error);
    }

    TEST_CASE("realize_spatial examples")
    {
        const PhasePoint pt(vec({1, 2, 3}), vec({0.1, 0, 0}), Chart::Commutative);
        const PhasePoint same = realize_spatial(pt, KappaParams::make(0.0, 1.0));
        CHECK(same.chart() == Chart::KappaRealized);
        CHECK((same.position() - pt.position()).norm() == 0.0);
        CHECK((same.momentum() - pt.momentum()).norm() == 0.0);

        const PhasePoint r =
            realize_spatial(PhasePoint(vec({1, 0, 0}), vec({0, 1, 0}), Chart::Commutative), KappaParams::make(0.1, 1.0));
        CHECK(r.position()[0] == doctest::Approx(1.1).epsilon(1e-15));
        CHECK(r.momentum()[1] == doctest::Approx(1.1).epsilon(1e-15));

        const PhasePoint ident = realize_spatial(pt, KappaParams::make(0.7, 0.0));
        CHECK(ident.max_abs_diff(PhasePoint(pt.position(), pt.momentum(), Chart::KappaRealized)) == 0.0);
    }

    TEST_CASE("realize_spatial requires the commutative chart")
    {
        const PhasePoint pt(vec({1, 0, 0}), vec({0, 1, 0}), Chart::Kepler);
        CHECK_THROWS_AS(realize_spatial(pt, KappaParams{}), Error);
    }

    TEST_CASE("unrealize inverts realize at random points")
    {
        Rng rng(7);
        const KappaParams p = KappaParams::make(0.3, 1.0, 1.5);
        for (int k = 0; k < 100; ++k) {
            const PhasePoint pt = PhasePoint::from_flat(random_phase_vector(rng, 3), Chart::Commutative);
            CHECK(unrealize_spatial(realize_spatial(pt, p), p).max_abs_diff(pt) < 1e-12);
        }
    }

    TEST_CASE("realize_full at a = 0 is the identity")
    {
        Rng rng(3);
        for (int k = 0; k < 20; ++k) {
            const FullPhasePoint fp{rng.uniform_vec(4, -2, 2), rng.uniform_vec(4, -2, 2)};
            const FullPhasePoint out = realize_full(fp, KappaParams::make(0.0, 1.0));
            CHECK((out.flat() - fp.flat()).cwiseAbs().maxCoeff() < 1e-14);
        }
    }

    TEST_CASE("realize_full spatial part matches realize_spatial with beta = 0")
    {
        Rng rng(11);
        for (int k = 0; k < 100; ++k) {
            const FullPhasePoint fp{rng.uniform_vec(4, -2, 2), rng.uniform_vec(4, -2, 2)};
            KappaParams p = KappaParams::make(0.1, 1.0);
            p.p0 = fp.p[0];
            const FullPhasePoint full = realize_full(fp, p);
            const PhasePoint spatial =
                realize_spatial(PhasePoint(fp.x.tail(3), fp.p.tail(3), Chart::Commutative), p);
            CHECK((full.x.tail(3) - spatial.position()).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((full.p.tail(3) - spatial.momentum()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    TEST_CASE("gamma only moves the time components")
    {
        Rng rng(5);
        const FullPhasePoint fp{rng.uniform_vec(4, -2, 2), rng.uniform_vec(4, -2, 2)};
        const FullPhasePoint g0 = realize_full(fp, 0.1, RealizationCoefficients{1.0, 0.0, 0.0});
        const FullPhasePoint g2 = realize_full(fp, 0.1, RealizationCoefficients{1.0, 0.0, 2.0});
        CHECK((g0.x.tail(3) - g2.x.tail(3)).norm() == 0.0);
        CHECK((g0.p.tail(3) - g2.p.tail(3)).norm() == 0.0);
        CHECK(std::abs(g0.x[0] - g2.x[0]) > 1e-6);
    }

    TEST_CASE("poisson bracket of canonical pairs and realized coordinates")
    {
        Rng rng(1);
        const Vec z = random_phase_vector(rng, 3);
        const ScalarField x1 = [](const Vec& w) { return w[0]; };
        const ScalarField p1 = [](const Vec& w) { return w[3]; };
        CHECK(poisson_bracket(x1, p1, z) == doctest::Approx(1.0).epsilon(1e-9));

        const KappaParams p = KappaParams::make(0.1, 1.0);
        auto psi = [&](Eigen::Index i) {
            return ScalarField([&, i](const Vec& w) {
                return realize_spatial(PhasePoint::from_flat(w, Chart::Commutative), p).position()[i];
            });
        };
        CHECK(std::abs(poisson_bracket(psi(0), psi(1), z)) < 1e-8);
    }

    TEST_CASE("poisson bracket reports non-finite stencils")
    {
        const ScalarField bad = [](const Vec& w) { return 1.0 / w[0]; };
        const ScalarField p1 = [](const Vec& w) { return w[3]; };
        CHECK_THROWS_AS(poisson_bracket(bad, p1, Vec::Zero(6)), Error);
    }

    TEST_CASE("full realization reproduces the kappa-Minkowski bracket")
    {
        Rng rng(9);
        for (double a : {0.0, 0.01, 0.1}) {
            const KappaParams p = KappaParams::make(a, 1.0);
            for (int k = 0; k < 10; ++k) {
                const Vec z = concat(rng.uniform_vec(4, -2, 2), rng.uniform_vec(4, -2, 2));
                auto psi = [&](Eigen::Index mu) {
                    return ScalarField([&, mu](const Vec& w) { return realize_full(FullPhasePoint::from_flat(w), p).x[mu]; });
                };
                const double psi1 = realize_full(FullPhasePoint::from_flat(z), p).x[1];
                CHECK(std::abs(poisson_bracket(psi(0), psi(1), z) - a * psi1) < 1e-6);
                CHECK(std::abs(poisson_bracket(psi(1), psi(2), z)) < 1e-6);
            }
        }
    }

    TEST_CASE("bracket audit: commutative baseline passes without warnings")
    {
        const auto reports = bracket_audit(KappaParams::make(0.0, 1.0), 30, 42);
        for (const auto& r : reports) {
            CHECK_MESSAGE(r.pass, r.identity_name);
            CHECK_MESSAGE(!r.warning, r.identity_name);
            CHECK(r.max_residual < 1e-8);
        }
    }

    TEST_CASE("bracket audit surfaces lambda^2 on the canonical pair")
    {
        const KappaParams p = KappaParams::make(0.1, 1.0);
        const auto reports = bracket_audit(p, 30, 42);
        const CheckReport& pair = find(reports, "spatial {psi^i,phi^j} = delta_ij");
        CHECK(pair.pass);
        REQUIRE(pair.warning);
        CHECK(pair.max_residual == doctest::Approx(0.21).epsilon(1e-6));
        CHECK(pair.details.at("measured_factor_mean") == doctest::Approx(1.21).epsilon(1e-8));
        CHECK(pair.details.at("max_residual_vs_lambda_squared") < 1e-8);
        CHECK(find(reports, "full {psi^0,psi^i} = a psi^i").max_residual < 1e-6);
        CHECK(find(reports, "full {psi^i,psi^j} = 0").max_residual < 1e-6);
    }
}
