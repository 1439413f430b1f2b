#include "kreg/poisson.hpp"

#include "kreg/error.hpp"
#include "kreg/sampling.hpp"

namespace kreg {

namespace {

double bracket_at(const ScalarField& f, const ScalarField& g, const Vec& z, double h)
{
    const Vec df = central_gradient(f, z, h);
    const Vec dg = central_gradient(g, z, h);
    const Eigen::Index n = z.size() / 2;
    return df.head(n).dot(dg.tail(n)) - df.tail(n).dot(dg.head(n));
}

}  // namespace

double poisson_bracket(const ScalarField& f, const ScalarField& g, const Vec& z, double h)
{
    if (z.size() % 2 != 0) {
        fail(ErrorKind::InvalidState, "phase-space vector must have even length");
    }
    if (!(h > 0.0)) {
        fail(ErrorKind::InvalidParams, "finite-difference step must be positive");
    }
    return (4.0 * bracket_at(f, g, z, 0.5 * h) - bracket_at(f, g, z, h)) / 3.0;
}

std::vector<CheckReport> poisson_engine_audit(std::size_t n_points, std::uint64_t seed)
{
    const ScalarField f = [](const Vec& z) { return z[0] * z[0] * z[4] + z[2]; };
    const ScalarField g = [](const Vec& z) { return z[3] * z[5] * z[1]; };
    const ScalarField h = [](const Vec& z) { return z[0] * z[1] + z[5] * z[5] - z[2] * z[3]; };
    auto nested = [](const ScalarField& a, const ScalarField& b, const ScalarField& c, const Vec& z) {
        const ScalarField inner = [&](const Vec& w) { return poisson_bracket(b, c, w); };
        // Coarser outer step keeps the nested rounding error small.
        return poisson_bracket(a, inner, z, 1e-3);
    };
    Rng rng(seed);
    std::vector<double> anti;
    std::vector<double> jacobi;
    for (std::size_t k = 0; k < n_points; ++k) {
        const Vec z = random_phase_vector(rng, 3);
        anti.push_back(std::abs(poisson_bracket(f, g, z) + poisson_bracket(g, f, z)));
        jacobi.push_back(std::abs(nested(f, g, h, z) + nested(g, h, f, z) + nested(h, f, g, z)));
    }
    return {summarize("{f,g} + {g,f} = 0", anti, 1e-10),
            summarize("{f,{g,h}} + {g,{h,f}} + {h,{f,g}} = 0", jacobi, 1e-5)};
}

}  // namespace kreg
