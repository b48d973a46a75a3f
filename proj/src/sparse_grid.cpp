#include <expanal/assignment.hpp>
#include <expanal/error.hpp>
#include <expanal/parallel.hpp>
#include <expanal/sparse_grid.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <string>

namespace expanal
{

namespace
{

constexpr std::size_t hungarian_limit = 64;

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double max_abs(std::span<const Complex> v)
{
    double m = 0.0;
    for (const auto& x : v)
    {
        m = std::max(m, std::abs(x));
    }
    return m;
}

template <typename T>
std::vector<T> permuted(const std::vector<T>& v, const std::vector<int>& p)
{
    std::vector<T> out;
    out.reserve(p.size());
    for (int i : p)
    {
        out.push_back(v[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::vector<Complex> line_values(const CoefficientSource& source, const IndexLine& line)
{
    std::vector<Complex> values;
    values.reserve(line.indices.size());
    for (const auto& k : line.indices)
    {
        values.push_back(source.at(k));
    }
    return values;
}

} // namespace

std::size_t SparseGridPlan::total_count() const
{
    std::size_t n = 0;
    for (const auto& l : axis_lines)
    {
        n += l.indices.size();
    }
    for (const auto& l : diagonal_lines)
    {
        n += l.indices.size();
    }
    return n;
}

std::size_t SparseGridPlan::distinct_count() const
{
    std::set<MultiIndex> all;
    for (const auto* group : {&axis_lines, &diagonal_lines})
    {
        for (const auto& l : *group)
        {
            all.insert(l.indices.begin(), l.indices.end());
        }
    }
    return all.size();
}

SparseGridPlan plan(int d, int N, int tau)
{
    if (d < 1)
    {
        throw Error(ErrorCode::BadParameters, "dimension must be >= 1");
    }
    if (tau < 1)
    {
        throw Error(ErrorCode::BadParameters, "tau must be >= 1");
    }
    if (N - tau < 1)
    {
        throw Error(ErrorCode::BadParameters,
                    "need N > tau (got N = " + std::to_string(N) + ", tau = " + std::to_string(tau) + ")");
    }
    SparseGridPlan p;
    p.d   = d;
    p.N   = N;
    p.tau = tau;
    for (auto& line : sparse_lines(d, N, tau))
    {
        (line.kind == IndexLine::Kind::Axis ? p.axis_lines : p.diagonal_lines).push_back(std::move(line));
    }
    return p;
}

AxisRecovery recover_axis(int axis, std::span<const Complex> values, const RationalOptions& options,
                          std::size_t expected_order)
{
    if (values.size() < 3 || values.size() % 2 == 0)
    {
        throw Error(ErrorCode::ShapeMismatch, "an axis line needs 2N + 1 samples");
    }
    const int N       = static_cast<int>(values.size() - 1) / 2;
    const auto points = integer_points(N);

    RationalOptions opts = options;
    if (expected_order > 0)
    {
        opts.max_order = expected_order + 1;
    }
    auto fit = fit_pole_residue(points, values, opts);

    if (expected_order > 0 && !fit.trace.converged)
    {
        throw Error(ErrorCode::AxisOrderMismatch,
                    "axis " + std::to_string(axis + 1) + " needs more than " +
                        std::to_string(expected_order) + " poles");
    }
    check_fit(points, values, fit, opts.tol);
    if (expected_order > 0 && fit.pr.size() != expected_order)
    {
        throw Error(ErrorCode::AxisOrderMismatch,
                    "axis " + std::to_string(axis + 1) + " yields " + std::to_string(fit.pr.size()) +
                        " poles, axis 1 yields " + std::to_string(expected_order));
    }

    AxisRecovery out;
    out.axis   = axis;
    out.poles  = std::move(fit.pr.poles);
    out.coeffs = std::move(fit.pr.residues);
    out.trace  = std::move(fit.trace);
    return out;
}

std::vector<Complex> pairing_system(std::span<const Complex> poles_prev,
                                    std::span<const Complex> poles_next,
                                    std::span<const Complex> diagonal_values, int N, int tau,
                                    double rcond)
{
    const std::size_t M = poles_prev.size();
    if (poles_next.size() != M)
    {
        throw Error(ErrorCode::ShapeMismatch, "pairing needs equally many poles on both axes");
    }
    const auto L = static_cast<std::size_t>(2 * N + 1 - 2 * tau);
    if (diagonal_values.size() != L)
    {
        throw Error(ErrorCode::ShapeMismatch,
                    "diagonal has " + std::to_string(diagonal_values.size()) + " samples, expected " +
                        std::to_string(L));
    }
    if (L < 2 * M)
    {
        throw Error(ErrorCode::IllConditioned,
                    "diagonal of " + std::to_string(L) + " samples cannot determine " +
                        std::to_string(2 * M) + " coefficients");
    }

    const auto m = static_cast<Eigen::Index>(M);
    ComplexMatrix a(static_cast<Eigen::Index>(L), 2 * m);
    for (std::size_t i = 0; i < L; ++i)
    {
        const double k = -N + static_cast<int>(i);
        for (Eigen::Index j = 0; j < m; ++j)
        {
            a(static_cast<Eigen::Index>(i), j)     = 1.0 / (k - poles_prev[static_cast<std::size_t>(j)]);
            a(static_cast<Eigen::Index>(i), m + j) = 1.0 / (k - (poles_next[static_cast<std::size_t>(j)] - 2.0 * tau));
        }
    }
    const linalg::LeastSquares ls(a, rcond);
    if (ls.rank() < 2 * m)
    {
        throw Error(ErrorCode::IllConditioned,
                    "pairing system has numerical rank " + std::to_string(ls.rank()) + " < " +
                        std::to_string(2 * M));
    }
    const ComplexVector r = Eigen::Map<const ComplexVector>(diagonal_values.data(), static_cast<Eigen::Index>(L));
    const ComplexVector c = ls.solve(r);
    return {c.data(), c.data() + c.size()};
}

Eigen::MatrixXd pairing_scores(std::span<const Complex> c, std::span<const Complex> coeffs_prev,
                               std::span<const Complex> poles_prev,
                               std::span<const Complex> poles_next, int tau)
{
    const std::size_t M = poles_prev.size();
    if (c.size() != 2 * M || coeffs_prev.size() != M || poles_next.size() != M)
    {
        throw Error(ErrorCode::ShapeMismatch, "pairing inputs disagree in length");
    }
    const double cmax = max_abs(c);
    const double amax = max_abs(coeffs_prev);
    if (cmax == 0.0 || amax == 0.0)
    {
        throw Error(ErrorCode::AmbiguousPairing, "all pairing coefficients vanish");
    }

    Eigen::MatrixXd s(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    for (std::size_t j = 0; j < M; ++j)
    {
        const Complex c1 = c[j];
        for (std::size_t k = 0; k < M; ++k)
        {
            const Complex c2    = c[M + k];
            const Complex bn    = poles_next[k];
            const Complex model = c1 + c2 * poles_prev[j] / bn - 2.0 * tau * c1 / bn;
            s(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                std::abs(c1 + c2) / cmax + std::abs(coeffs_prev[j] - model) / amax;
        }
    }
    return s;
}

PairingStage match_pairs(std::span<const Complex> c, std::span<const Complex> coeffs_prev,
                         std::span<const Complex> poles_prev, std::span<const Complex> poles_next,
                         int tau, const PairingOptions& options)
{
    const Eigen::MatrixXd s = pairing_scores(c, coeffs_prev, poles_prev, poles_next, tau);
    const std::size_t M     = poles_prev.size();

    PairingStage stage;
    stage.c.assign(c.begin(), c.end());
    stage.permutation = M <= hungarian_limit ? hungarian_assignment(s) : greedy_assignment(s);

    for (std::size_t j = 0; j < M; ++j)
    {
        const auto row     = static_cast<Eigen::Index>(j);
        const int k        = stage.permutation[j];
        const double score = s(row, k);
        double runner      = std::numeric_limits<double>::infinity();
        for (Eigen::Index other = 0; other < s.cols(); ++other)
        {
            if (other != k)
            {
                runner = std::min(runner, s(row, other));
            }
        }
        stage.matched_score.push_back(score);
        stage.runner_up.push_back(runner);

        if (!(score <= options.accept) || !(runner >= options.margin * score))
        {
            throw Error(ErrorCode::AmbiguousPairing,
                        "row " + std::to_string(j + 1) + ": best score " + fmt(score) +
                            ", runner-up " + fmt(runner));
        }
    }
    return stage;
}

SparseRecovery recover_sparse(const CoefficientSource& source, const SparseConfig& config)
{
    const auto* lines = std::get_if<SparseLines>(&source.coverage());
    if (lines == nullptr)
    {
        throw Error(ErrorCode::CoverageMismatch, "sparse recovery needs sparse-line coverage");
    }
    const int tau = config.tau == 0 ? lines->tau : config.tau;
    if (tau != lines->tau)
    {
        throw Error(ErrorCode::CoverageMismatch,
                    "tau = " + std::to_string(tau) + " does not match the grid's tau = " +
                        std::to_string(lines->tau));
    }
    const int d    = source.dimension();
    const int N    = source.half_width();
    const double P = source.period();
    const auto p   = plan(d, N, tau);
    source.require_complete();

    SparseRecovery out{ExponentialSum(ComplexMatrix::Ones(1, d), ComplexVector::Ones(1)), {}, {}};
    out.axes.resize(static_cast<std::size_t>(d));
    out.axes[0]          = recover_axis(0, line_values(source, p.axis_lines[0]), config.rational);
    const std::size_t M  = out.axes[0].poles.size();

    std::vector<std::vector<Complex>> axis_values(static_cast<std::size_t>(d));
    for (int m = 1; m < d; ++m)
    {
        axis_values[static_cast<std::size_t>(m)] = line_values(source, p.axis_lines[static_cast<std::size_t>(m)]);
    }
    parallel_for(static_cast<std::size_t>(d - 1), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
        {
            out.axes[i + 1] = recover_axis(static_cast<int>(i + 1), axis_values[i + 1], config.rational, M);
        }
    });

    for (const auto& ax : out.axes)
    {
        for (const auto& b : ax.poles)
        {
            if (std::abs(b.real()) >= tau)
            {
                throw Error(ErrorCode::TauViolation,
                            "axis " + std::to_string(ax.axis + 1) + " pole with |Re b| = " +
                                fmt(std::abs(b.real())) + " >= tau = " + std::to_string(tau));
            }
        }
    }

    for (int m = 1; m < d; ++m)
    {
        auto& prev         = out.axes[static_cast<std::size_t>(m - 1)];
        auto& next         = out.axes[static_cast<std::size_t>(m)];
        const auto diag    = line_values(source, p.diagonal_lines[static_cast<std::size_t>(m - 1)]);
        const auto c       = pairing_system(prev.poles, next.poles, diag, N, tau, config.rational.rcond);
        PairingStage stage = match_pairs(c, prev.coeffs, prev.poles, next.poles, tau, config.pairing);
        stage.axis         = m;
        next.poles         = permuted(next.poles, stage.permutation);
        next.coeffs        = permuted(next.coeffs, stage.permutation);
        out.certificate.stages.push_back(std::move(stage));
    }

    const auto rows = static_cast<Eigen::Index>(M);
    ComplexMatrix lambda(rows, d);
    ComplexVector gamma(rows);
    for (Eigen::Index j = 0; j < rows; ++j)
    {
        Complex a     = out.axes[0].coeffs[static_cast<std::size_t>(j)];
        Complex denom = 1.0;
        for (int l = 0; l < d; ++l)
        {
            const Complex b = out.axes[static_cast<std::size_t>(l)].poles[static_cast<std::size_t>(j)];
            lambda(j, l)    = two_pi_i * b / P;
            if (l > 0)
            {
                a *= -b;
            }
            denom *= (1.0 - std::exp(lambda(j, l) * P)) / two_pi_i;
        }
        gamma(j) = a / denom;
    }
    out.sum = ExponentialSum(std::move(lambda), std::move(gamma));
    return out;
}

} // namespace expanal
