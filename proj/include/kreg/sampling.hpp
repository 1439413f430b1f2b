#pragma once

#include <cstdint>
#include <random>

#include "kreg/linalg.hpp"

namespace kreg {

/// Seeded generator for audit points. Points are always drawn serially so a
/// battery sees the same points under every execution policy.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

    Vec uniform_vec(Eigen::Index n, double lo, double hi);
    Vec normal_vec(Eigen::Index n);

private:
    std::mt19937_64 gen_;
};

inline constexpr double kSampleBox = 2.0;
inline constexpr double kMinMomentum = 0.1;

/// Components uniform in [-2, 2]; momentum redrawn while |p| < 0.1.
Vec random_phase_vector(Rng& rng, Eigen::Index d);

}  // namespace kreg
