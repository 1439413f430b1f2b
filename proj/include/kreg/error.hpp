#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kreg {

enum class ErrorKind {
    InvalidParams,
    InvalidState,
    ChartMismatch,
    NonFiniteEvaluation,
    PoleSingularity,
    MomentumCollision,
    Collision,
    PositiveEnergy,
    ZeroFiber,
    DegenerateFiber,
    DegenerateParametrization,
    NoConvergence,
    Usage,
    IOError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Domain error raised by every module. The kind is machine readable and is
/// what the CLI reports; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace kreg
