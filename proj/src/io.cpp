#include <expanal/error.hpp>
#include <expanal/io.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace expanal::io
{

namespace
{

template <typename F>
auto parsing(const char* what, F&& f) -> decltype(f())
{
    try
    {
        return f();
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
    }
}

Json node_to_json(const PoleNode& node, double period)
{
    Json children = Json::array();
    for (const auto& c : node.children)
    {
        children.push_back(node_to_json(c, period));
    }
    return Json{{"pole", complex_to_json(node.pole)},
                {"frequency", complex_to_json(two_pi_i * node.pole / period)},
                {"depth", node.depth},
                {"multiplicity", node.multiplicity},
                {"children", std::move(children)}};
}

} // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    {
        throw Error(ErrorCode::ParseError, "complex value must be [re, im], got " + j.dump());
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Json sum_to_json(const ExponentialSum& sum, std::optional<double> period)
{
    Json gamma  = Json::array();
    Json lambda = Json::array();
    for (int j = 0; j < sum.order(); ++j)
    {
        gamma.push_back(complex_to_json(sum.coefficients()(j)));
        Json row = Json::array();
        for (int l = 0; l < sum.dimension(); ++l)
        {
            row.push_back(complex_to_json(sum.frequencies()(j, l)));
        }
        lambda.push_back(std::move(row));
    }
    Json out{{"d", sum.dimension()}};
    if (period)
    {
        out["P"] = *period;
    }
    out["gamma"]  = std::move(gamma);
    out["lambda"] = std::move(lambda);
    return out;
}

ExponentialSum sum_from_json(const Json& j)
{
    return parsing("signal", [&] {
        const int d        = j.at("d").get<int>();
        const Json& gamma  = j.at("gamma");
        const Json& lambda = j.at("lambda");
        if (d < 1 || !gamma.is_array() || !lambda.is_array() || gamma.size() != lambda.size() ||
            gamma.empty())
        {
            throw Error(ErrorCode::ParseError,
                        "signal needs d >= 1 and equally long, nonempty 'gamma' and 'lambda'");
        }
        const auto M = static_cast<Eigen::Index>(gamma.size());
        ComplexMatrix lam(M, d);
        ComplexVector g(M);
        for (Eigen::Index r = 0; r < M; ++r)
        {
            g(r)            = complex_from_json(gamma[static_cast<std::size_t>(r)]);
            const Json& row = lambda[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != d)
            {
                throw Error(ErrorCode::ParseError, "lambda row " + std::to_string(r) + " must have d entries");
            }
            for (int l = 0; l < d; ++l)
            {
                lam(r, l) = complex_from_json(row[static_cast<std::size_t>(l)]);
            }
        }
        return ExponentialSum(std::move(lam), std::move(g));
    });
}

std::optional<double> period_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("P"))
    {
        return std::nullopt;
    }
    return parsing("period", [&] { return std::optional<double>(j.at("P").get<double>()); });
}

Json grid_to_json(const CoefficientSource& source, const ExponentialSum* truth)
{
    Json entries = Json::array();
    for (const auto& [k, c] : source.entries())
    {
        entries.push_back(Json{{"k", k}, {"c", complex_to_json(c)}});
    }
    Json out{{"d", source.dimension()},
             {"P", source.period()},
             {"N", source.half_width()},
             {"coverage", coverage_to_string(source.coverage())},
             {"entries", std::move(entries)}};
    if (truth != nullptr)
    {
        out["truth"] = sum_to_json(*truth);
    }
    return out;
}

GridFile grid_from_json(const Json& j)
{
    return parsing("coefficient grid", [&] {
        const int d        = j.at("d").get<int>();
        const double P     = j.at("P").get<double>();
        const int N        = j.at("N").get<int>();
        const auto cover   = parse_coverage(j.at("coverage").get<std::string>());
        if (!(P > 0.0) || N < 1 || d < 1)
        {
            throw Error(ErrorCode::ParseError, "grid needs d >= 1, P > 0 and N >= 1");
        }
        CoefficientSource source(d, P, N, cover);
        for (const auto& e : j.at("entries"))
        {
            const auto k = e.at("k").get<std::vector<int>>();
            if (static_cast<int>(k.size()) != d)
            {
                throw Error(ErrorCode::ParseError, "entry index has the wrong length");
            }
            source.set(k, complex_from_json(e.at("c")));
        }
        GridFile out{std::move(source), std::nullopt};
        if (j.contains("truth"))
        {
            out.truth = sum_from_json(j.at("truth"));
        }
        return out;
    });
}

Json trace_to_json(const AaaTrace& trace)
{
    return Json{{"iterations", trace.iterations},
                {"converged", trace.converged},
                {"max_residual_history", trace.max_residual_history},
                {"chosen_support_order", trace.chosen_support_order}};
}

Json certificate_to_json(const PairingCertificate& certificate)
{
    Json stages = Json::array();
    for (const auto& s : certificate.stages)
    {
        Json c = Json::array();
        for (const auto& v : s.c)
        {
            c.push_back(complex_to_json(v));
        }
        stages.push_back(Json{{"axes", {s.axis, s.axis + 1}},
                              {"permutation", s.permutation},
                              {"c", std::move(c)},
                              {"matched_score", s.matched_score},
                              {"runner_up", s.runner_up}});
    }
    return Json{{"stages", std::move(stages)}};
}

Json tree_to_json(const PoleTree& tree, double period)
{
    Json roots = Json::array();
    for (const auto& r : tree.roots)
    {
        roots.push_back(node_to_json(r, period));
    }
    return Json{{"d", tree.d},
                {"leaves", tree.leaf_count()},
                {"level_sizes", tree.level_sizes()},
                {"roots", std::move(roots)}};
}

Json errors_to_json(const ErrorReport& report)
{
    return Json{{"e_lambda", report.e_lambda},
                {"e_gamma", report.e_gamma},
                {"e_f", report.e_f},
                {"matched_permutation", report.matched_permutation},
                {"order_mismatch", report.order_mismatch}};
}

Json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parsing(path.c_str(), [&] { return Json::parse(buf.str()); });
}

void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw Error(ErrorCode::InvalidArgument, "cannot write '" + tmp.string() + "'");
        }
        out << content;
        out.flush();
        if (!out)
        {
            throw Error(ErrorCode::InvalidArgument, "failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
    {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::InvalidArgument, "cannot move output into '" + path + "'");
    }
}

} // namespace expanal::io
