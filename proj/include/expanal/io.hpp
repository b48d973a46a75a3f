#ifndef EXPANAL_IO_HPP
#define EXPANAL_IO_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include <expanal/expsum.hpp>
#include <expanal/rational.hpp>
#include <expanal/recursive.hpp>
#include <expanal/sparse_grid.hpp>

namespace expanal::io
{

using Json = nlohmann::json;

// Complex numbers travel as [re, im].
Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

/// {"d", "gamma", "lambda"} plus "P" when a period is given.
Json sum_to_json(const ExponentialSum& sum, std::optional<double> period = std::nullopt);
ExponentialSum sum_from_json(const Json& j);
std::optional<double> period_from_json(const Json& j);

struct GridFile
{
    CoefficientSource source;
    std::optional<ExponentialSum> truth;
};

Json grid_to_json(const CoefficientSource& source, const ExponentialSum* truth = nullptr);
GridFile grid_from_json(const Json& j);

Json trace_to_json(const AaaTrace& trace);
Json certificate_to_json(const PairingCertificate& certificate);
Json tree_to_json(const PoleTree& tree, double period);
Json errors_to_json(const ErrorReport& report);

/// Parses a file; malformed JSON or unreadable files raise ParseError.
Json read_json(const std::string& path);

/// Writes through a temporary file in the same directory and renames it over
/// the target.
void write_atomic(const std::string& path, const std::string& content);

} // namespace expanal::io

#endif
