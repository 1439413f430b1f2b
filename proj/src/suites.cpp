#include "kreg/suites.hpp"

#include <cmath>

#include "kreg/error.hpp"
#include "kreg/kepler.hpp"
#include "kreg/ligon_schaaf.hpp"
#include "kreg/moser.hpp"
#include "kreg/poisson.hpp"
#include "kreg/stereo.hpp"

namespace kreg {

namespace {

constexpr std::size_t kBracketPoints = 100;
constexpr std::size_t kStereoPoints = 100;
constexpr std::size_t kMoserPoints = 100;
constexpr std::size_t kSo4Points = 50;
constexpr std::size_t kLsPoints = 200;
constexpr std::size_t kRoundTripPoints = 100;

void append(std::vector<CheckReport>& out, std::vector<CheckReport> more)
{
    for (auto& r : more) {
        out.push_back(std::move(r));
    }
}

std::vector<CheckReport> brackets(const SuiteOptions& o)
{
    std::vector<CheckReport> out = bracket_audit(o.params, kBracketPoints, o.seed, o.exec);
    append(out, poisson_engine_audit(20, o.seed));
    return out;
}

std::vector<CheckReport> stereo(const SuiteOptions& o) { return stereo_audit(o.params, kStereoPoints, o.seed, o.exec); }

std::vector<CheckReport> moser(const SuiteOptions& o)
{
    PipelineConfig cfg;
    cfg.step = o.step;
    cfg.duration = o.duration;
    std::vector<CheckReport> out = moser_identity_audit(o.params, kMoserPoints, o.seed, o.exec);
    append(out, moser_pipeline_audit(o.params, cfg));
    append(out, regularization_demo(o.params, cfg));
    return out;
}

std::vector<CheckReport> so4(const SuiteOptions& o)
{
    const KeplerSystem sys = KeplerSystem::from_params(o.params);
    std::vector<CheckReport> out = so4_audit(sys, kSo4Points, o.seed, o.exec);
    append(out, kepler_identity_audit(sys, kRoundTripPoints, o.seed, o.exec));
    return out;
}

std::vector<CheckReport> ls(const SuiteOptions& o)
{
    const KeplerSystem sys = KeplerSystem::from_params(o.params);
    std::vector<CheckReport> out = intertwine_audit(sys, kLsPoints, o.seed, o.exec);
    out.push_back(ls_round_trip_audit(sys, kRoundTripPoints, o.seed, o.exec));

    const double v_circ = sys.circular_speed(1.0);
    const Vec3 orbits[][2] = {
        {Vec3(1.0, 0.0, 0.0), Vec3(0.0, v_circ, 0.0)},
        {Vec3(0.7, 0.2, 0.0), Vec3(0.1, 1.1 * v_circ, 0.3)},
        {Vec3(1.0, 0.2, 0.0), Vec3(0.1, 0.9 * v_circ, 0.3)},
    };
    const char* labels[] = {"circular", "inclined ellipse 1", "inclined ellipse 2"};
    for (std::size_t k = 0; k < 3; ++k) {
        CheckReport r = flow_conjugacy_check(orbits[k][0], orbits[k][1], sys, o.duration, o.step);
        r.identity_name += std::string(" [") + labels[k] + "]";
        out.push_back(std::move(r));
    }
    append(out, delaunay_dynamics_audit(sys, o.seed, o.duration, o.step));
    return out;
}

}  // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"brackets", "stereo", "moser", "so4", "ls", "all"};
    return names;
}

std::vector<CheckReport> run_suite(std::string_view name, const SuiteOptions& options)
{
    options.params.validate();
    if (name == "brackets") {
        return brackets(options);
    }
    if (name == "stereo") {
        return stereo(options);
    }
    if (name == "moser") {
        return moser(options);
    }
    if (name == "so4") {
        return so4(options);
    }
    if (name == "ls") {
        return ls(options);
    }
    if (name == "all") {
        std::vector<CheckReport> out;
        for (const auto& n : suite_names()) {
            if (n != "all") {
                append(out, run_suite(n, options));
            }
        }
        return out;
    }
    fail(ErrorKind::Usage, "unknown suite '" + std::string(name) + "' (brackets, stereo, moser, so4, ls, all)");
}

}  // namespace kreg
