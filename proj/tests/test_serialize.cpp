#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kreg/error.hpp"
#include "kreg/kepler.hpp"
#include "kreg/serialize.hpp"

using namespace kreg;

TEST_SUITE("serialize")
{
    TEST_CASE("params round trip; gamma is never written")
    {
        KappaParams p = KappaParams::make(0.125, 0.5, 1.7, 2.3, 0.25);
        p.p0 = 0.9;
        const json j = to_json(p);
        CHECK_FALSE(j.contains("gamma"));
        const KappaParams back = params_from_json(j);
        CHECK(back.a == p.a);
        CHECK(back.alpha == p.alpha);
        CHECK(back.beta == p.beta);
        CHECK(back.p0 == p.p0);
        CHECK(back.m == p.m);
        CHECK(back.C == p.C);
    }

    TEST_CASE("params defaults and validation")
    {
        const KappaParams p = params_from_json(json{{"m", 3.0}});
        CHECK(p.p0 == 3.0);
        CHECK(p.a == 0.0);
        CHECK(params_from_json(json{{"alpha", 2.0}, {"gamma", 1.0}}).alpha == 2.0);
        CHECK_THROWS_AS(params_from_json(json{{"alpha", 1.0}, {"gamma", 2.0}}), Error);
        CHECK_THROWS_AS(params_from_json(json{{"a", -1.0}}), Error);
        CHECK_THROWS_AS(params_from_json(json{{"a", "big"}}), Error);
        CHECK_THROWS_AS(params_from_json(json::array()), Error);
    }

    TEST_CASE("points and states")
    {
        Vec q(3);
        q << 0.1, 1.0 / 3.0, -2e-17;
        Vec p(3);
        p << 1e300, -0.0, 7.0;
        const PhasePoint pt(q, p, Chart::Kepler);
        const PhasePoint back = phase_point_from_json(json::parse(to_json(pt).dump()), Chart::Commutative);
        CHECK(back.chart() == Chart::Kepler);
        CHECK((back.position().array() == q.array()).all());
        CHECK((back.momentum().array() == p.array()).all());

        const SphereState s = sphere_state_from_json(json{{"u", {0, 0, -1}}, {"v", {1, 2, 0}}});
        CHECK(s.dim() == 2);
        CHECK_THROWS_AS(sphere_state_from_json(json{{"u", {0, 0, -2}}, {"v", {1, 2, 0}}}), Error);
        CHECK_THROWS_AS(sphere_state_from_json(json{{"u", {0, 0, -1}}}), Error);
        CHECK_THROWS_AS(phase_point_from_json(json{{"position", {1, 2}}, {"momentum", {1, 2, 3}}}, Chart::Kepler), Error);
        CHECK_THROWS_AS(phase_point_from_json(json{{"position", {1, "x"}}, {"momentum", {1, 2}}}, Chart::Kepler), Error);

        const DelaunayState st{Vec4(1, 0, 0, 0), Vec4(0, 2, 0, 0)};
        const DelaunayState st2 = delaunay_state_from_json(to_json(st));
        CHECK(st2.x == st.x);
        CHECK(st2.y == st.y);
    }

    TEST_CASE("check reports keep non-finite residuals and warnings")
    {
        CheckReport r = summarize("x", std::vector<double>{1.0, std::nan("")}, 1.0);
        r.warning = "surfaced";
        r.details["k"] = 2.0;
        const json j = to_json(r);
        CHECK(j.at("identity_name") == "x");
        CHECK(j.at("pass") == false);
        CHECK(j.at("max_residual") == "inf");
        CHECK(j.at("warning") == "surfaced");
        CHECK(j.at("details").at("k") == 2.0);
        for (const char* key : {"n_points", "mean_residual", "tolerance"}) {
            CHECK(j.contains(key));
        }
    }

    TEST_CASE("trajectory JSON and CSV")
    {
        Trajectory traj;
        traj.chart = "kepler";
        traj.state_names = {"q1", "p1"};
        traj.invariant_names = {"H"};
        traj.samples.push_back(Sample{0.0, Vec(Eigen::Vector2d(1.0, 0.1)), Vec::Constant(1, -0.5)});
        traj.samples.push_back(Sample{0.1, Vec(Eigen::Vector2d(1.0 / 3.0, 0.2)), Vec::Constant(1, -0.5)});
        traj.termination = Termination::Collision;

        const json j = to_json(traj);
        CHECK(j.at("termination") == "Collision");
        CHECK(j.at("samples").size() == 2);
        CHECK(j.at("samples")[1].at("state")[0].get<double>() == 1.0 / 3.0);

        std::ostringstream out;
        write_csv(out, traj);
        std::istringstream in(out.str());
        std::string meta;
        std::string header;
        std::string row0;
        std::string row1;
        std::getline(in, meta);
        std::getline(in, header);
        std::getline(in, row0);
        std::getline(in, row1);
        CHECK(meta.rfind("# chart=kepler", 0) == 0);
        CHECK(meta.find("termination=Collision") != std::string::npos);
        CHECK(header == "t,q1,p1,H");
        CHECK(std::stod(row1.substr(row1.find(',') + 1)) == 1.0 / 3.0);
        CHECK(format_double(0.1) == "0.10000000000000001");
    }

    TEST_CASE("run config overlay")
    {
        const RunConfig base;
        CHECK(base.seed == 42);
        const RunConfig c = run_config_from_json(
            json{{"params", {{"a", 0.1}}}, {"integrator", {{"method", "verlet"}, {"step", 0.01}}}, {"format", "csv"}},
            base);
        CHECK(c.params.a == 0.1);
        CHECK(c.integrator.method == Method::StormerVerlet);
        CHECK(c.integrator.step == 0.01);
        CHECK(c.format == Format::Csv);
        CHECK(c.seed == 42);
        const RunConfig back = run_config_from_json(to_json(c));
        CHECK(to_json(back) == to_json(c));
        CHECK_THROWS_AS(run_config_from_json(json{{"format", "xml"}}), Error);
    }
}
