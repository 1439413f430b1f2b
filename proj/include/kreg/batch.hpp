#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace kreg::batch {

/// Execution policy for point batteries. Serial is the reference path; the
/// parallel path must produce bit-identical results.
enum class Exec { Serial, Parallel };

Exec default_exec() noexcept;
bool parallel_available() noexcept;

/// Per-point kernel: index in [0, n) to a residual. Must be pure.
using Kernel = std::function<double(std::size_t)>;

std::vector<double> evaluate_serial(std::size_t n, const Kernel& kernel);
std::vector<double> evaluate_parallel(std::size_t n, const Kernel& kernel);

inline std::vector<double> evaluate(std::size_t n, const Kernel& kernel, Exec exec)
{
    return exec == Exec::Serial ? evaluate_serial(n, kernel) : evaluate_parallel(n, kernel);
}

/// Vector-valued variant: each kernel call fills one row of `width` residuals.
using RowKernel = std::function<void(std::size_t, double*)>;

std::vector<double> evaluate_rows(std::size_t n, std::size_t width, const RowKernel& kernel, Exec exec);

}  // namespace kreg::batch
