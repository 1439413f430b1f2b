#include "kreg/numdiff.hpp"

#include <cmath>

#include "kreg/error.hpp"

namespace kreg {

namespace {

double eval_checked(const ScalarField& f, const Vec& z)
{
    const double v = f(z);
    if (!std::isfinite(v)) {
        fail(ErrorKind::NonFiniteEvaluation, "non-finite value at a finite-difference stencil point");
    }
    return v;
}

Vec eval_checked(const VectorMap& f, const Vec& z)
{
    Vec v = f(z);
    if (!v.allFinite()) {
        fail(ErrorKind::NonFiniteEvaluation, "non-finite value at a finite-difference stencil point");
    }
    return v;
}

Mat central_jacobian(const VectorMap& map, const Vec& z, double h)
{
    Vec zp = z;
    Vec zm = z;
    Mat J;
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        zp[k] = z[k] + h;
        zm[k] = z[k] - h;
        const Vec col = (eval_checked(map, zp) - eval_checked(map, zm)) / (2.0 * h);
        if (k == 0) {
            J.resize(col.size(), z.size());
        }
        J.col(k) = col;
        zp[k] = z[k];
        zm[k] = z[k];
    }
    return J;
}

}  // namespace

Vec central_gradient(const ScalarField& f, const Vec& z, double h)
{
    Vec grad(z.size());
    Vec zp = z;
    Vec zm = z;
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        zp[k] = z[k] + h;
        zm[k] = z[k] - h;
        grad[k] = (eval_checked(f, zp) - eval_checked(f, zm)) / (2.0 * h);
        zp[k] = z[k];
        zm[k] = z[k];
    }
    return grad;
}

Vec gradient(const ScalarField& f, const Vec& z, double h)
{
    return (4.0 * central_gradient(f, z, 0.5 * h) - central_gradient(f, z, h)) / 3.0;
}

Mat jacobian(const VectorMap& map, const Vec& z, double h)
{
    return (4.0 * central_jacobian(map, z, 0.5 * h) - central_jacobian(map, z, h)) / 3.0;
}

}  // namespace kreg
