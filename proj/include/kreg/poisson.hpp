#pragma once

#include <cstdint>
#include <vector>

#include "kreg/check_report.hpp"
#include "kreg/kappa_phase.hpp"
#include "kreg/numdiff.hpp"

namespace kreg {

/// Canonical Poisson bracket on a flat phase space z = (x_1..x_n, p_1..p_n):
/// sum_k df/dx_k dg/dp_k - df/dp_k dg/dx_k, from central differences with one
/// Richardson step at the bracket level, (4 B(h/2) - B(h)) / 3.
double poisson_bracket(const ScalarField& f, const ScalarField& g, const Vec& z, double h = kDefaultStep);

inline double poisson_bracket(const ScalarField& f, const ScalarField& g, const PhasePoint& pt,
                              double h = kDefaultStep)
{
    return poisson_bracket(f, g, pt.flat(), h);
}

/// Antisymmetry and Jacobi identity of the engine on polynomial fields.
std::vector<CheckReport> poisson_engine_audit(std::size_t n_points, std::uint64_t seed);

}  // namespace kreg
