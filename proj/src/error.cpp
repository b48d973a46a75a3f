#include <expanal/error.hpp>

namespace expanal
{

std::string_view error_name(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateFrequency: return "DegenerateFrequency";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::AxisOrderMismatch: return "AxisOrderMismatch";
    case ErrorCode::AmbiguousPairing: return "AmbiguousPairing";
    case ErrorCode::TauViolation: return "TauViolation";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::CoverageMismatch: return "CoverageMismatch";
    case ErrorCode::MissingCoefficient: return "MissingCoefficient";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace expanal
