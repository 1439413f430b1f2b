#pragma once

#include <Eigen/Dense>

namespace kreg {

using Vec = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat = Eigen::MatrixXd;

inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// Concatenate two vectors, e.g. (q, p) into a flat phase-space state.
inline Vec concat(const Vec& a, const Vec& b)
{
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
}

}  // namespace kreg
