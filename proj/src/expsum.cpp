#include <expanal/error.hpp>
#include <expanal/expsum.hpp>
#include <expanal/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <tuple>

namespace expanal
{

namespace
{

bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

std::size_t ipow(std::size_t base, int exp)
{
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i)
    {
        r *= base;
    }
    return r;
}

} // namespace

ExponentialSum::ExponentialSum(ComplexMatrix frequencies, ComplexVector coefficients)
    : lambda_(std::move(frequencies)), gamma_(std::move(coefficients))
{
    if (lambda_.rows() < 1 || lambda_.cols() < 1)
    {
        throw Error(ErrorCode::InvalidArgument, "exponential sum needs M >= 1 and d >= 1");
    }
    if (gamma_.size() != lambda_.rows())
    {
        throw Error(ErrorCode::ShapeMismatch, "coefficient count differs from frequency rows");
    }
    if (!all_finite(lambda_) || !gamma_.allFinite())
    {
        throw Error(ErrorCode::NonFinite, "exponential sum parameters must be finite");
    }
    for (Eigen::Index j = 0; j < gamma_.size(); ++j)
    {
        if (gamma_(j) == Complex{})
        {
            throw Error(ErrorCode::InvalidArgument,
                        "coefficient " + std::to_string(j) + " is zero");
        }
    }
    for (Eigen::Index i = 0; i < lambda_.rows(); ++i)
    {
        for (Eigen::Index j = i + 1; j < lambda_.rows(); ++j)
        {
            if (lambda_.row(i) == lambda_.row(j))
            {
                throw Error(ErrorCode::InvalidArgument,
                            "frequency rows " + std::to_string(i) + " and " +
                                std::to_string(j) + " coincide");
            }
        }
    }
}

Complex ExponentialSum::operator()(std::span<const double> t) const
{
    if (static_cast<Eigen::Index>(t.size()) != lambda_.cols())
    {
        throw Error(ErrorCode::ShapeMismatch, "evaluation point has wrong dimension");
    }
    Complex sum{};
    for (Eigen::Index j = 0; j < lambda_.rows(); ++j)
    {
        Complex exponent{};
        for (Eigen::Index l = 0; l < lambda_.cols(); ++l)
        {
            exponent += lambda_(j, l) * t[static_cast<std::size_t>(l)];
        }
        sum += gamma_(j) * std::exp(exponent);
    }
    return sum;
}

Complex evaluate(const ExponentialSum& sum, std::span<const double> t) { return sum(t); }

//
// Coverage
//

std::string coverage_to_string(const Coverage& coverage)
{
    if (const auto* s = std::get_if<SparseLines>(&coverage))
    {
        return "sparse:" + std::to_string(s->tau);
    }
    return "full";
}

Coverage parse_coverage(const std::string& text)
{
    if (text == "full")
    {
        return FullGrid{};
    }
    const std::string prefix = "sparse:";
    if (text.rfind(prefix, 0) == 0)
    {
        const std::string tail = text.substr(prefix.size());
        std::size_t used       = 0;
        int tau                = 0;
        try
        {
            tau = std::stoi(tail, &used);
        }
        catch (const std::exception&)
        {
            used = 0;
        }
        if (used == tail.size() && !tail.empty() && tau >= 1)
        {
            return SparseLines{tau};
        }
    }
    throw Error(ErrorCode::ParseError, "coverage must be 'full' or 'sparse:<tau>', got '" + text + "'");
}

std::vector<IndexLine> sparse_lines(int d, int N, int tau)
{
    std::vector<IndexLine> lines;
    for (int m = 0; m < d; ++m)
    {
        IndexLine line{IndexLine::Kind::Axis, m, {}};
        for (int k = -N; k <= N; ++k)
        {
            MultiIndex idx(static_cast<std::size_t>(d), 0);
            idx[static_cast<std::size_t>(m)] = k;
            line.indices.push_back(std::move(idx));
        }
        lines.push_back(std::move(line));
    }
    for (int m = 0; m + 1 < d; ++m)
    {
        IndexLine line{IndexLine::Kind::Diagonal, m, {}};
        for (int k = -N; k <= N - 2 * tau; ++k)
        {
            MultiIndex idx(static_cast<std::size_t>(d), 0);
            idx[static_cast<std::size_t>(m)]     = k;
            idx[static_cast<std::size_t>(m + 1)] = k + 2 * tau;
            line.indices.push_back(std::move(idx));
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

//
// CoefficientSource
//

struct CoefficientSource::Audit
{
    std::mutex mutex;
    std::set<MultiIndex> seen;
    bool all = false;
};

CoefficientSource::CoefficientSource(int d, double period, int half_width, Coverage coverage)
    : d_(d), period_(period), n_(half_width), coverage_(coverage)
{
    if (d < 1)
    {
        throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
    }
    if (!(period > 0.0) || !std::isfinite(period))
    {
        throw Error(ErrorCode::InvalidArgument, "period must be positive");
    }
    if (half_width < 1)
    {
        throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
    }
    if (const auto* s = std::get_if<SparseLines>(&coverage_))
    {
        if (s->tau < 1)
        {
            throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
        }
    }
    if (is_full_grid())
    {
        const std::size_t total = ipow(static_cast<std::size_t>(2 * n_ + 1), d_);
        dense_.assign(total, Complex{});
        present_.assign(total, 0);
    }
}

bool CoefficientSource::is_full_grid() const noexcept
{
    return std::holds_alternative<FullGrid>(coverage_);
}

void CoefficientSource::check_box(std::span<const int> k) const
{
    if (static_cast<int>(k.size()) != d_)
    {
        throw Error(ErrorCode::ShapeMismatch, "multi-index has wrong dimension");
    }
}

bool CoefficientSource::covers(std::span<const int> k) const
{
    check_box(k);
    for (int v : k)
    {
        if (v < -n_ || v > n_)
        {
            return false;
        }
    }
    if (is_full_grid())
    {
        return true;
    }
    const int tau = std::get<SparseLines>(coverage_).tau;

    int nonzero = 0;
    for (int v : k)
    {
        nonzero += v != 0 ? 1 : 0;
    }
    if (nonzero <= 1)
    {
        return true; // on an axis line
    }
    for (int m = 0; m + 1 < d_; ++m)
    {
        bool ok = k[static_cast<std::size_t>(m + 1)] == k[static_cast<std::size_t>(m)] + 2 * tau &&
                  k[static_cast<std::size_t>(m)] <= n_ - 2 * tau;
        for (int l = 0; ok && l < d_; ++l)
        {
            if (l != m && l != m + 1 && k[static_cast<std::size_t>(l)] != 0)
            {
                ok = false;
            }
        }
        if (ok)
        {
            return true;
        }
    }
    return false;
}

std::size_t CoefficientSource::flat_index(std::span<const int> k) const
{
    std::size_t idx        = 0;
    const std::size_t side = static_cast<std::size_t>(2 * n_ + 1);
    for (int v : k)
    {
        idx = idx * side + static_cast<std::size_t>(v + n_);
    }
    return idx;
}

bool CoefficientSource::contains(std::span<const int> k) const
{
    if (!covers(k))
    {
        return false;
    }
    if (is_full_grid())
    {
        return present_[flat_index(k)] != 0;
    }
    return sparse_.count(MultiIndex(k.begin(), k.end())) != 0;
}

void CoefficientSource::set(std::span<const int> k, Complex value)
{
    if (!covers(k))
    {
        throw Error(ErrorCode::CoverageMismatch,
                    "index outside the declared coverage " + coverage_to_string(coverage_));
    }
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    {
        throw Error(ErrorCode::NonFinite, "coefficient value must be finite");
    }
    if (is_full_grid())
    {
        const auto i = flat_index(k);
        dense_[i]    = value;
        present_[i]  = 1;
    }
    else
    {
        sparse_[MultiIndex(k.begin(), k.end())] = value;
    }
}

Complex CoefficientSource::at(std::span<const int> k) const
{
    if (!contains(k))
    {
        std::string s = "(";
        for (std::size_t i = 0; i < k.size(); ++i)
        {
            s += (i ? "," : "") + std::to_string(k[i]);
        }
        throw Error(ErrorCode::MissingCoefficient, "no coefficient stored for index " + s + ")");
    }
    record(k);
    if (is_full_grid())
    {
        return dense_[flat_index(k)];
    }
    return sparse_.at(MultiIndex(k.begin(), k.end()));
}

std::size_t CoefficientSource::size() const
{
    if (is_full_grid())
    {
        return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), 1));
    }
    return sparse_.size();
}

std::size_t CoefficientSource::expected_size() const
{
    if (is_full_grid())
    {
        return dense_.size();
    }
    std::set<MultiIndex> all;
    for (const auto& line : sparse_lines(d_, n_, std::get<SparseLines>(coverage_).tau))
    {
        all.insert(line.indices.begin(), line.indices.end());
    }
    return all.size();
}

void CoefficientSource::require_complete() const
{
    if (size() != expected_size())
    {
        throw Error(ErrorCode::MissingCoefficient,
                    "coefficient source holds " + std::to_string(size()) + " of " +
                        std::to_string(expected_size()) + " covered indices");
    }
}

std::vector<std::pair<MultiIndex, Complex>> CoefficientSource::entries() const
{
    std::vector<std::pair<MultiIndex, Complex>> out;
    if (is_full_grid())
    {
        const std::size_t side = static_cast<std::size_t>(2 * n_ + 1);
        for (std::size_t i = 0; i < dense_.size(); ++i)
        {
            if (!present_[i])
            {
                continue;
            }
            MultiIndex k(static_cast<std::size_t>(d_));
            std::size_t rest = i;
            for (int l = d_ - 1; l >= 0; --l)
            {
                k[static_cast<std::size_t>(l)] = static_cast<int>(rest % side) - n_;
                rest /= side;
            }
            out.emplace_back(std::move(k), dense_[i]);
        }
    }
    else
    {
        out.assign(sparse_.begin(), sparse_.end());
    }
    return out;
}

const std::vector<Complex>& CoefficientSource::grid_values() const
{
    if (!is_full_grid())
    {
        throw Error(ErrorCode::CoverageMismatch, "grid_values needs a full-grid source");
    }
    require_complete();
    record_all();
    return dense_;
}

void CoefficientSource::start_audit() const { audit_ = std::make_shared<Audit>(); }

void CoefficientSource::record(std::span<const int> k) const
{
    if (auto a = audit_)
    {
        std::lock_guard lock(a->mutex);
        a->seen.emplace(k.begin(), k.end());
    }
}

void CoefficientSource::record_all() const
{
    if (auto a = audit_)
    {
        std::lock_guard lock(a->mutex);
        a->all = true;
    }
}

std::set<MultiIndex> CoefficientSource::audited_indices() const
{
    auto a = audit_;
    if (!a)
    {
        return {};
    }
    std::lock_guard lock(a->mutex);
    if (!a->all)
    {
        return a->seen;
    }
    std::set<MultiIndex> out;
    for (auto& e : entries())
    {
        out.insert(e.first);
    }
    return out;
}

//
// Coefficient synthesis
//

bool is_degenerate_frequency(Complex lambda, double period)
{
    const Complex b = lambda * period / two_pi_i;
    const Complex nearest{std::round(b.real()), 0.0};
    return std::abs(b - nearest) <= 1e-12 * std::max(1.0, std::abs(b));
}

Complex axis_factor(Complex lambda, int k, double period)
{
    const Complex lp    = lambda * period;
    const Complex denom = lp - two_pi_i * static_cast<double>(k);
    if (std::abs(denom) <= 1e-12 * std::max(1.0, std::abs(lp)))
    {
        return Complex{1.0, 0.0};
    }
    return (std::exp(lp) - 1.0) / denom;
}

Complex fourier_coefficient(const ExponentialSum& sum, std::span<const int> k, double period)
{
    if (!(period > 0.0))
    {
        throw Error(ErrorCode::InvalidArgument, "period must be positive");
    }
    if (static_cast<int>(k.size()) != sum.dimension())
    {
        throw Error(ErrorCode::ShapeMismatch, "multi-index has wrong dimension");
    }
    const auto& lambda = sum.frequencies();
    const auto& gamma  = sum.coefficients();
    Complex c{};
    for (int j = 0; j < sum.order(); ++j)
    {
        Complex term = gamma(j);
        for (int l = 0; l < sum.dimension(); ++l)
        {
            term *= axis_factor(lambda(j, l), k[static_cast<std::size_t>(l)], period);
        }
        c += term;
    }
    return c;
}

CoefficientSource synthesize(const ExponentialSum& sum, double period, int half_width,
                             const Coverage& coverage)
{
    const int d = sum.dimension();
    const int M = sum.order();
    CoefficientSource source(d, period, half_width, coverage);

    const auto& lambda = sum.frequencies();
    for (int j = 0; j < M; ++j)
    {
        for (int l = 0; l < d; ++l)
        {
            if (is_degenerate_frequency(lambda(j, l), period))
            {
                throw Error(ErrorCode::DegenerateFrequency,
                            "lambda[" + std::to_string(j) + "][" + std::to_string(l) +
                                "] is 2 pi i k / P for an integer k");
            }
        }
    }

    // factors[(l * M + j) * side + (k + N)]
    const int side = 2 * half_width + 1;
    std::vector<Complex> factors(static_cast<std::size_t>(d * M * side));
    for (int l = 0; l < d; ++l)
    {
        for (int j = 0; j < M; ++j)
        {
            for (int k = -half_width; k <= half_width; ++k)
            {
                factors[static_cast<std::size_t>((l * M + j) * side + k + half_width)] =
                    axis_factor(lambda(j, l), k, period);
            }
        }
    }
    const auto& gamma = sum.coefficients();
    auto coefficient  = [&](std::span<const int> k) {
        Complex c{};
        for (int j = 0; j < M; ++j)
        {
            Complex term = gamma(j);
            for (int l = 0; l < d; ++l)
            {
                term *= factors[static_cast<std::size_t>((l * M + j) * side +
                                                         k[static_cast<std::size_t>(l)] + half_width)];
            }
            c += term;
        }
        return c;
    };

    if (source.is_full_grid())
    {
        const std::size_t total = ipow(static_cast<std::size_t>(side), d);
        std::vector<Complex> values(total);
        parallel_for(total, [&](std::size_t begin, std::size_t end) {
            MultiIndex k(static_cast<std::size_t>(d));
            for (std::size_t i = begin; i < end; ++i)
            {
                std::size_t rest = i;
                for (int l = d - 1; l >= 0; --l)
                {
                    k[static_cast<std::size_t>(l)] = static_cast<int>(rest % side) - half_width;
                    rest /= static_cast<std::size_t>(side);
                }
                values[i] = coefficient(k);
            }
        });
        MultiIndex k(static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < total; ++i)
        {
            std::size_t rest = i;
            for (int l = d - 1; l >= 0; --l)
            {
                k[static_cast<std::size_t>(l)] = static_cast<int>(rest % side) - half_width;
                rest /= static_cast<std::size_t>(side);
            }
            source.set(k, values[i]);
        }
    }
    else
    {
        const int tau = std::get<SparseLines>(coverage).tau;
        for (const auto& line : sparse_lines(d, half_width, tau))
        {
            for (const auto& k : line.indices)
            {
                source.set(k, coefficient(k));
            }
        }
    }
    return source;
}

//
// Error metrics
//

std::vector<int> match_rows(const ComplexMatrix& truth, const ComplexMatrix& recon)
{
    if (truth.cols() != recon.cols())
    {
        throw Error(ErrorCode::ShapeMismatch, "frequency matrices differ in dimension");
    }
    struct Candidate
    {
        double dist;
        int i;
        int j;
    };
    std::vector<Candidate> candidates;
    for (int i = 0; i < truth.rows(); ++i)
    {
        for (int j = 0; j < recon.rows(); ++j)
        {
            candidates.push_back({(truth.row(i) - recon.row(j)).norm(), i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.dist, a.i, a.j) < std::tie(b.dist, b.i, b.j);
    });

    std::vector<int> match(static_cast<std::size_t>(truth.rows()), -1);
    std::vector<char> used(static_cast<std::size_t>(recon.rows()), 0);
    for (const auto& c : candidates)
    {
        if (match[static_cast<std::size_t>(c.i)] < 0 && !used[static_cast<std::size_t>(c.j)])
        {
            match[static_cast<std::size_t>(c.i)] = c.j;
            used[static_cast<std::size_t>(c.j)]  = 1;
        }
    }
    return match;
}

std::pair<double, double> max_deviation(const ExponentialSum& f, const ExponentialSum& g,
                                        const ErrorOptions& options)
{
    const int d = f.dimension();
    if (g.dimension() != d)
    {
        throw Error(ErrorCode::ShapeMismatch, "sums differ in dimension");
    }
    const int P = options.points_per_axis;
    if (P < 2)
    {
        throw Error(ErrorCode::InvalidArgument, "need at least two points per axis");
    }

    std::vector<double> t(static_cast<std::size_t>(P));
    for (int i = 0; i < P; ++i)
    {
        t[static_cast<std::size_t>(i)] = -options.box + 2.0 * options.box * i / (P - 1);
    }

    // table[(l * M + j) * P + i] = gamma_j^(l == 0) * exp(lambda_jl t_i)
    auto tabulate = [&](const ExponentialSum& s) {
        const int M = s.order();
        std::vector<Complex> table(static_cast<std::size_t>(d * M * P));
        for (int l = 0; l < d; ++l)
        {
            for (int j = 0; j < M; ++j)
            {
                for (int i = 0; i < P; ++i)
                {
                    Complex v = std::exp(s.frequencies()(j, l) * t[static_cast<std::size_t>(i)]);
                    if (l == 0)
                    {
                        v *= s.coefficients()(j);
                    }
                    table[static_cast<std::size_t>((l * M + j) * P + i)] = v;
                }
            }
        }
        return table;
    };
    const auto tf = tabulate(f);
    const auto tg = tabulate(g);
    auto eval     = [&](const std::vector<Complex>& table, int M, const int* idx) {
        Complex sum{};
        for (int j = 0; j < M; ++j)
        {
            Complex term = table[static_cast<std::size_t>(j * P + idx[0])];
            for (int l = 1; l < d; ++l)
            {
                term *= table[static_cast<std::size_t>((l * M + j) * P + idx[l])];
            }
            sum += term;
        }
        return sum;
    };

    const std::size_t lattice = ipow(static_cast<std::size_t>(P), d);
    const bool sampled        = d >= 4 && lattice > options.max_points;
    const std::size_t count   = sampled ? options.max_points : lattice;

    std::vector<int> samples;
    if (sampled)
    {
        std::mt19937_64 rng(options.seed);
        std::uniform_int_distribution<int> axis(0, P - 1);
        samples.resize(count * static_cast<std::size_t>(d));
        for (auto& s : samples)
        {
            s = axis(rng);
        }
    }

    const std::size_t workers = std::max<std::size_t>(1, std::min(worker_count(), count));
    std::vector<double> dev(workers, 0.0);
    std::vector<double> mag(workers, 0.0);
    const std::size_t chunk = (count + workers - 1) / workers;
    parallel_for(workers, [&](std::size_t wb, std::size_t we) {
        std::vector<int> idx(static_cast<std::size_t>(d));
        for (std::size_t w = wb; w < we; ++w)
        {
            const std::size_t begin = w * chunk;
            const std::size_t end   = std::min(count, begin + chunk);
            for (std::size_t p = begin; p < end; ++p)
            {
                if (sampled)
                {
                    std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(p * d), d, idx.begin());
                }
                else
                {
                    std::size_t rest = p;
                    for (int l = d - 1; l >= 0; --l)
                    {
                        idx[static_cast<std::size_t>(l)] = static_cast<int>(rest % P);
                        rest /= static_cast<std::size_t>(P);
                    }
                }
                const Complex vf = eval(tf, f.order(), idx.data());
                const Complex vg = eval(tg, g.order(), idx.data());
                dev[w]           = std::max(dev[w], std::abs(vf - vg));
                mag[w]           = std::max(mag[w], std::abs(vf));
            }
        }
    });
    return {*std::max_element(dev.begin(), dev.end()), *std::max_element(mag.begin(), mag.end())};
}

ErrorReport relative_errors(const ExponentialSum& truth, const ExponentialSum& recon,
                            const ErrorOptions& options)
{
    if (truth.dimension() != recon.dimension())
    {
        throw Error(ErrorCode::ShapeMismatch, "truth and reconstruction differ in dimension");
    }
    ErrorReport report;
    report.order_mismatch      = truth.order() != recon.order();
    report.matched_permutation = match_rows(truth.frequencies(), recon.frequencies());

    const auto& lt = truth.frequencies();
    const auto& lr = recon.frequencies();
    const auto& gt = truth.coefficients();
    const auto& gr = recon.coefficients();

    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : num; };

    for (int l = 0; l < truth.dimension(); ++l)
    {
        double num = 0.0;
        double den = 0.0;
        for (int j = 0; j < truth.order(); ++j)
        {
            const int r = report.matched_permutation[static_cast<std::size_t>(j)];
            if (r < 0)
            {
                continue;
            }
            num = std::max(num, std::abs(lt(j, l) - lr(r, l)));
            den = std::max(den, std::abs(lt(j, l)));
        }
        report.e_lambda = std::max(report.e_lambda, ratio(num, den));
    }

    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j < truth.order(); ++j)
    {
        const int r = report.matched_permutation[static_cast<std::size_t>(j)];
        if (r < 0)
        {
            continue;
        }
        num = std::max(num, std::abs(gt(j) - gr(r)));
        den = std::max(den, std::abs(gt(j)));
    }
    report.e_gamma = ratio(num, den);

    const auto [dev, mag] = max_deviation(truth, recon, options);
    report.e_f            = ratio(dev, mag);
    return report;
}

} // namespace expanal
