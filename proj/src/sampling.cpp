#include "kreg/sampling.hpp"

namespace kreg {

Vec Rng::uniform_vec(Eigen::Index n, double lo, double hi)
{
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = uniform(lo, hi);
    }
    return v;
}

Vec Rng::normal_vec(Eigen::Index n)
{
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = normal();
    }
    return v;
}

Vec random_phase_vector(Rng& rng, Eigen::Index d)
{
    const Vec x = rng.uniform_vec(d, -kSampleBox, kSampleBox);
    Vec p = rng.uniform_vec(d, -kSampleBox, kSampleBox);
    while (p.norm() < kMinMomentum) {
        p = rng.uniform_vec(d, -kSampleBox, kSampleBox);
    }
    return concat(x, p);
}

}  // namespace kreg
