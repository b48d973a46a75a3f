#include <expanal/error.hpp>
#include <expanal/rational.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace expanal
{

using linalg::ComplexMatrix;
using linalg::ComplexVector;

namespace
{

void require_distinct(std::span<const Complex> points)
{
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        for (std::size_t j = i + 1; j < points.size(); ++j)
        {
            if (points[i] == points[j])
            {
                throw Error(ErrorCode::InvalidArgument, "sample points must be pairwise distinct");
            }
        }
    }
}

void require_same_length(std::span<const Complex> points, std::span<const Complex> values)
{
    if (points.size() != values.size())
    {
        throw Error(ErrorCode::ShapeMismatch,
                    "got " + std::to_string(points.size()) + " points but " +
                        std::to_string(values.size()) + " values");
    }
}

} // namespace

bool pole_less(Complex a, Complex b)
{
    if (a.real() != b.real())
    {
        return a.real() < b.real();
    }
    return a.imag() < b.imag();
}

//
// Barycentric form
//

Complex BarycentricForm::operator()(Complex z) const
{
    if (support.size() == 1)
    {
        return values[0];
    }
    Complex num{};
    Complex den{};
    for (std::size_t s = 0; s < support.size(); ++s)
    {
        if (z == support[s])
        {
            return values[s];
        }
        const Complex c = weights[s] / (z - support[s]);
        num += c * values[s];
        den += c;
    }
    return num / den;
}

Complex evaluate_barycentric(const BarycentricForm& form, Complex z) { return form(z); }

AaaResult aaa_fit(std::span<const Complex> points, std::span<const Complex> values, double tol,
                  std::size_t max_order)
{
    require_same_length(points, values);
    if (points.size() < 2)
    {
        throw Error(ErrorCode::InvalidArgument, "AAA needs at least two sample points");
    }
    if (!(tol > 0.0))
    {
        throw Error(ErrorCode::InvalidArgument, "AAA tolerance must be positive");
    }
    if (max_order < 1)
    {
        throw Error(ErrorCode::InvalidArgument, "AAA max_order must be >= 1");
    }
    require_distinct(points);

    const std::size_t n_pts = points.size();
    double fmax             = 0.0;
    std::size_t first       = 0;
    for (std::size_t i = 0; i < n_pts; ++i)
    {
        if (std::abs(values[i]) > fmax)
        {
            fmax  = std::abs(values[i]);
            first = i;
        }
    }

    AaaResult result;
    auto& form  = result.form;
    auto& trace = result.trace;

    std::vector<char> in_support(n_pts, 0);
    std::size_t next = first;

    while (true)
    {
        in_support[next] = 1;
        form.support.push_back(points[next]);
        form.values.push_back(values[next]);
        trace.chosen_support_order.push_back(next);

        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n_pts; ++i)
        {
            if (!in_support[i])
            {
                rest.push_back(i);
            }
        }

        const std::size_t n = form.support.size();
        if (n == 1)
        {
            form.weights = {Complex{1.0, 0.0}};
        }
        else if (rest.empty())
        {
            form.weights.assign(n, Complex{1.0 / std::sqrt(static_cast<double>(n)), 0.0});
        }
        else
        {
            ComplexMatrix loewner(static_cast<Eigen::Index>(rest.size()), static_cast<Eigen::Index>(n));
            for (std::size_t r = 0; r < rest.size(); ++r)
            {
                for (std::size_t s = 0; s < n; ++s)
                {
                    loewner(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
                        (values[rest[r]] - form.values[s]) / (points[rest[r]] - form.support[s]);
                }
            }
            const ComplexVector w = linalg::smallest_right_singular_vector(loewner);
            form.weights.assign(w.data(), w.data() + w.size());
        }

        double max_residual = 0.0;
        std::size_t argmax  = n_pts;
        for (std::size_t i : rest) // ascending, so ties keep the smallest index
        {
            const double res = std::abs(values[i] - form(points[i]));
            if (!(res <= max_residual)) // also catches NaN
            {
                max_residual = res;
                argmax       = i;
            }
        }
        trace.max_residual_history.push_back(max_residual);
        trace.iterations = n;

        if (max_residual <= tol * fmax)
        {
            trace.converged = true;
            break;
        }
        if (n >= max_order || argmax == n_pts)
        {
            break;
        }
        next = argmax;
    }
    return result;
}

std::vector<Complex> poles_of(const BarycentricForm& form)
{
    const auto n = static_cast<Eigen::Index>(form.size());
    if (n < 2)
    {
        return {};
    }
    ComplexMatrix a = ComplexMatrix::Zero(n + 1, n + 1);
    ComplexMatrix b = ComplexMatrix::Zero(n + 1, n + 1);
    for (Eigen::Index s = 0; s < n; ++s)
    {
        a(0, s + 1)     = form.weights[static_cast<std::size_t>(s)];
        a(s + 1, 0)     = 1.0;
        a(s + 1, s + 1) = form.support[static_cast<std::size_t>(s)];
        b(s + 1, s + 1) = 1.0;
    }
    auto poles = linalg::finite_eigenvalues(a, b);
    std::sort(poles.begin(), poles.end(), pole_less);
    return poles;
}

LoewnerMatrices loewner_matrices(std::span<const Complex> points, std::span<const Complex> values,
                                 std::span<const std::size_t> support)
{
    require_same_length(points, values);
    std::vector<char> in_support(points.size(), 0);
    for (std::size_t s : support)
    {
        if (s >= points.size() || in_support[s])
        {
            throw Error(ErrorCode::InvalidArgument, "support indices must be distinct and in range");
        }
        in_support[s] = 1;
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        if (!in_support[i])
        {
            rest.push_back(i);
        }
    }

    LoewnerMatrices out;
    out.l0.resize(static_cast<Eigen::Index>(rest.size()), static_cast<Eigen::Index>(support.size()));
    out.l1.resizeLike(out.l0);
    for (std::size_t r = 0; r < rest.size(); ++r)
    {
        const Complex kl = points[rest[r]];
        const Complex cl = values[rest[r]];
        for (std::size_t s = 0; s < support.size(); ++s)
        {
            const Complex ks = points[support[s]];
            const Complex cs = values[support[s]];
            const auto i     = static_cast<Eigen::Index>(r);
            const auto j     = static_cast<Eigen::Index>(s);
            out.l0(i, j)     = (cl - cs) / (kl - ks);
            out.l1(i, j)     = (kl * cl - ks * cs) / (kl - ks);
        }
    }
    return out;
}

std::vector<Complex> loewner_pencil_poles(std::span<const Complex> points,
                                          std::span<const Complex> values, std::size_t order,
                                          const PencilOptions& options)
{
    require_same_length(points, values);
    if (order < 1)
    {
        throw Error(ErrorCode::InvalidArgument, "pencil order must be >= 1");
    }
    if (points.size() < 2 * order)
    {
        throw Error(ErrorCode::InvalidArgument,
                    "Loewner pencil of order " + std::to_string(order) + " needs at least " +
                        std::to_string(2 * order) + " points");
    }

    // Greedy support: the first `order` points an AAA run would pick.
    const auto aaa = aaa_fit(points, values, std::numeric_limits<double>::min(), order);
    const auto& support = aaa.trace.chosen_support_order;
    if (support.size() < order)
    {
        throw Error(ErrorCode::RankDeficient, "data interpolated exactly before reaching the requested order");
    }

    const auto lm      = loewner_matrices(points, values, support);
    const auto factors = linalg::svd(lm.l0);
    const auto m       = static_cast<Eigen::Index>(order);
    if (factors.sigma.size() < m || !(factors.sigma(m - 1) > options.rcond * factors.sigma(0)))
    {
        throw Error(ErrorCode::RankDeficient,
                    "numerical rank of L(0) is below the requested order " + std::to_string(order));
    }
    const ComplexMatrix u  = factors.u.leftCols(m);
    const ComplexMatrix a  = u.adjoint() * lm.l1;
    const ComplexMatrix b  = u.adjoint() * lm.l0;
    auto poles             = linalg::finite_eigenvalues(a, b);
    std::sort(poles.begin(), poles.end(), pole_less);
    return poles;
}

std::vector<Complex> residues_ls(std::span<const Complex> poles, std::span<const Complex> points,
                                 std::span<const Complex> values, double rcond)
{
    require_same_length(points, values);
    ComplexMatrix cauchy(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(poles.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        for (std::size_t j = 0; j < poles.size(); ++j)
        {
            if (points[i] == poles[j])
            {
                throw Error(ErrorCode::InvalidArgument, "a pole coincides with a sample point");
            }
            cauchy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0 / (points[i] - poles[j]);
        }
    }
    if (poles.empty())
    {
        return {};
    }
    const ComplexVector rhs = Eigen::Map<const ComplexVector>(values.data(), static_cast<Eigen::Index>(values.size()));
    const ComplexVector a   = linalg::lstsq(cauchy, rhs, rcond);
    return {a.data(), a.data() + a.size()};
}

Complex PoleResidue::operator()(Complex z) const
{
    Complex sum{};
    for (std::size_t j = 0; j < poles.size(); ++j)
    {
        sum += residues[j] / (z - poles[j]);
    }
    return sum;
}

void sort_by_pole(PoleResidue& pr)
{
    std::vector<std::size_t> order(pr.poles.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return pole_less(pr.poles[i], pr.poles[j]); });
    PoleResidue sorted;
    for (std::size_t i : order)
    {
        sorted.poles.push_back(pr.poles[i]);
        sorted.residues.push_back(pr.residues[i]);
    }
    pr = std::move(sorted);
}

std::vector<Complex> integer_points(int N)
{
    std::vector<Complex> points;
    points.reserve(static_cast<std::size_t>(2 * N + 1));
    for (int k = -N; k <= N; ++k)
    {
        points.emplace_back(static_cast<double>(k), 0.0);
    }
    return points;
}

PoleResidueFit fit_pole_residue(std::span<const Complex> points, std::span<const Complex> values,
                                const RationalOptions& options)
{
    std::size_t max_order = options.max_order;
    if (max_order == 0)
    {
        const std::size_t half = (points.size() - 1) / 2;
        max_order              = std::max<std::size_t>(2, std::min<std::size_t>(half, 100));
    }

    PoleResidueFit fit;
    auto aaa  = aaa_fit(points, values, options.tol, max_order);
    fit.trace = std::move(aaa.trace);
    fit.form  = std::move(aaa.form);

    const std::size_t order = fit.trace.iterations - 1;
    if (order == 0)
    {
        return fit;
    }

    if (options.method == PoleMethod::LoewnerPencil && points.size() >= 2 * order)
    {
        fit.pr.poles = loewner_pencil_poles(points, values, order, {options.tol, options.rcond});
    }
    else
    {
        fit.pr.poles = poles_of(fit.form);
    }
    fit.pr.residues = residues_ls(fit.pr.poles, points, values, options.rcond);

    // Spurious-pole filter: drop negligible residues and refit the rest.
    while (!fit.pr.poles.empty())
    {
        double amax = 0.0;
        for (const auto& a : fit.pr.residues)
        {
            amax = std::max(amax, std::abs(a));
        }
        PoleResidue kept;
        for (std::size_t j = 0; j < fit.pr.poles.size(); ++j)
        {
            if (std::abs(fit.pr.residues[j]) >= options.froissart * amax && amax > 0.0)
            {
                kept.poles.push_back(fit.pr.poles[j]);
            }
        }
        if (kept.poles.size() == fit.pr.poles.size())
        {
            break;
        }
        fit.dropped += fit.pr.poles.size() - kept.poles.size();
        kept.residues = residues_ls(kept.poles, points, values, options.rcond);
        fit.pr        = std::move(kept);
    }
    sort_by_pole(fit.pr);
    return fit;
}

void check_fit(std::span<const Complex> points, std::span<const Complex> values,
               const PoleResidueFit& fit, double tol)
{
    double max_index = 0.0;
    for (const auto& k : points)
    {
        max_index = std::max(max_index, std::abs(k.real()));
    }
    if (!fit.trace.converged)
    {
        throw Error(ErrorCode::NoConvergence,
                    "AAA reached " + std::to_string(fit.trace.iterations) +
                        " support points without meeting the tolerance");
    }
    if (fit.pr.poles.empty())
    {
        throw Error(ErrorCode::InvalidArgument, "coefficients carry no rational component");
    }

    // A frequency 2 pi i k0 / P leaves a single coefficient off the rational
    // structure; the fit absorbs it with a pole at the integer k0.
    double scale = 0.0;
    for (const auto& v : values)
    {
        scale = std::max(scale, std::abs(v));
    }
    std::vector<std::size_t> bad;
    const double threshold = std::max(1e3 * tol, 1e-9) * scale;
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        if (std::abs(fit.pr(points[i]) - values[i]) > threshold)
        {
            bad.push_back(i);
        }
    }
    for (const auto& b : fit.pr.poles)
    {
        const double nearest = std::round(b.real());
        if (std::abs(b - Complex{nearest, 0.0}) <= 1e-6 * std::max(1.0, std::abs(b)) &&
            std::abs(nearest) <= max_index)
        {
            throw Error(ErrorCode::DegenerateFrequency,
                        "recovered pole sits on the sample index " + std::to_string(static_cast<int>(nearest)));
        }
    }
    if (!bad.empty())
    {
        if (bad.size() * 2 < points.size())
        {
            throw Error(ErrorCode::DegenerateFrequency,
                        "fit misses the coefficient at index " +
                            std::to_string(static_cast<int>(points[bad.front()].real())));
        }
        throw Error(ErrorCode::NoConvergence, "pole-residue form does not reproduce the data");
    }
}

UnivariateRecovery recover_univariate(const CoefficientSource& source, const RationalOptions& options)
{
    if (source.dimension() != 1)
    {
        throw Error(ErrorCode::InvalidArgument, "univariate recovery needs a d = 1 source");
    }
    const int N        = source.half_width();
    const double P     = source.period();
    const auto points  = integer_points(N);
    std::vector<Complex> values;
    for (int k = -N; k <= N; ++k)
    {
        values.push_back(source.at(std::array<int, 1>{k}));
    }

    auto fit = fit_pole_residue(points, values, options);
    check_fit(points, values, fit, options.tol);

    const std::size_t M = fit.pr.size();
    ComplexMatrix lambda(static_cast<Eigen::Index>(M), 1);
    ComplexVector gamma(static_cast<Eigen::Index>(M));
    for (std::size_t j = 0; j < M; ++j)
    {
        const Complex l = two_pi_i * fit.pr.poles[j] / P;
        lambda(static_cast<Eigen::Index>(j), 0) = l;
        gamma(static_cast<Eigen::Index>(j))     = two_pi_i * fit.pr.residues[j] / (1.0 - std::exp(l * P));
    }
    return {ExponentialSum(std::move(lambda), std::move(gamma)), std::move(fit)};
}

} // namespace expanal
