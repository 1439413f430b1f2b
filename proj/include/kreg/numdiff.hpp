#pragma once

#include <functional>

#include "kreg/linalg.hpp"

namespace kreg {

using ScalarField = std::function<double(const Vec&)>;
using VectorMap = std::function<Vec(const Vec&)>;

inline constexpr double kDefaultStep = 1e-5;

/// Central-difference gradient at step h. Throws NonFiniteEvaluation.
Vec central_gradient(const ScalarField& f, const Vec& z, double h);

/// Central-difference gradient with one Richardson step: (4 D(h/2) - D(h)) / 3.
Vec gradient(const ScalarField& f, const Vec& z, double h = kDefaultStep);

/// Jacobian (rows: outputs, columns: inputs), Richardson-extrapolated.
Mat jacobian(const VectorMap& map, const Vec& z, double h = kDefaultStep);

}  // namespace kreg
