#ifndef EXPANAL_ERROR_HPP
#define EXPANAL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace expanal
{

enum class ErrorCode
{
    InvalidArgument,
    NonFinite,
    ShapeMismatch,
    ConvergenceFailure,
    NoConvergence,
    DegenerateFrequency,
    RankDeficient,
    IllConditioned,
    AxisOrderMismatch,
    AmbiguousPairing,
    TauViolation,
    BadParameters,
    OrderMismatch,
    CoverageMismatch,
    MissingCoefficient,
    ParseError,
};

std::string_view error_name(ErrorCode code) noexcept;

//
// Single exception type for the library; the code identifies the failure
// class and is what the CLI reports in its payloads.
//
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message),
          code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }

private:
    ErrorCode code_;
};

} // namespace expanal

#endif
