#include "kreg/batch.hpp"

#include <exception>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace kreg::batch {

bool parallel_available() noexcept
{
#if defined(_OPENMP)
    return true;
#else
    return false;
#endif
}

Exec default_exec() noexcept { return parallel_available() ? Exec::Parallel : Exec::Serial; }

std::vector<double> evaluate_serial(std::size_t n, const Kernel& kernel)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = kernel(i);
    }
    return out;
}

namespace {

// Exceptions cannot cross an OpenMP region; the lowest failing index wins so
// the rethrown error matches the serial path.
void rethrow_first(const std::vector<std::exception_ptr>& errors)
{
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace

std::vector<double> evaluate_parallel(std::size_t n, const Kernel& kernel)
{
    std::vector<double> out(n);
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = kernel(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    rethrow_first(errors);
    return out;
}

std::vector<double> evaluate_rows(std::size_t n, std::size_t width, const RowKernel& kernel, Exec exec)
{
    std::vector<double> out(n * width);
    if (exec == Exec::Serial) {
        for (std::size_t i = 0; i < n; ++i) {
            kernel(i, out.data() + i * width);
        }
        return out;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            kernel(k, out.data() + k * width);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    rethrow_first(errors);
    return out;
}

}  // namespace kreg::batch
