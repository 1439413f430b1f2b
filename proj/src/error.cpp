#include "kreg/error.hpp"

namespace kreg {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::ChartMismatch: return "ChartMismatch";
    case ErrorKind::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorKind::PoleSingularity: return "PoleSingularity";
    case ErrorKind::MomentumCollision: return "MomentumCollision";
    case ErrorKind::Collision: return "Collision";
    case ErrorKind::PositiveEnergy: return "PositiveEnergy";
    case ErrorKind::ZeroFiber: return "ZeroFiber";
    case ErrorKind::DegenerateFiber: return "DegenerateFiber";
    case ErrorKind::DegenerateParametrization: return "DegenerateParametrization";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::IOError: return "IOError";
    }
    return "Unknown";
}

}  // namespace kreg
