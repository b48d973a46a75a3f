#include <expanal/error.hpp>
#include <expanal/parallel.hpp>
#include <expanal/recursive.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace expanal
{

namespace
{

std::size_t ipow(std::size_t base, int exp)
{
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i)
    {
        r *= base;
    }
    return r;
}

std::string path_text(const std::vector<Complex>& path)
{
    std::string s = "(";
    for (std::size_t i = 0; i < path.size(); ++i)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.6g%+.6gi", i ? ", " : "", path[i].real(), path[i].imag());
        s += buf;
    }
    return s + ")";
}

// Error messages carry "<Name>: " in front; keep only the detail.
std::string detail(const Error& e)
{
    std::string msg = e.what();
    const auto name = std::string(e.name()) + ": ";
    return msg.rfind(name, 0) == 0 ? msg.substr(name.size()) : msg;
}

struct Builder
{
    const RecursiveConfig& config;
    RationalOptions options;
    int N;
    std::vector<AaaTrace> traces;

    std::vector<PoleNode> build(const Slice& slice, int depth, std::vector<Complex>& path)
    {
        DistinctPoles dp;
        std::vector<Slice> children;
        try
        {
            RationalOptions opts = options;
            if (depth > 1)
            {
                opts.froissart = std::max(opts.froissart, config.branch_froissart);
            }
            dp = distinct_poles(leading_line(slice, N), opts, config.merge_tol);
            if (slice.dims > 1)
            {
                children = peel_dimension(dp.poles, slice, N, options.rcond);
            }
        }
        catch (const Error& e)
        {
            throw Error(e.code(), "dimension " + std::to_string(depth) + " below path " +
                                      path_text(path) + ": " + detail(e));
        }
        traces.push_back(std::move(dp.trace));

        std::vector<PoleNode> nodes;
        nodes.reserve(dp.poles.size());
        for (std::size_t m = 0; m < dp.poles.size(); ++m)
        {
            PoleNode node;
            node.pole  = dp.poles[m];
            node.depth = depth;
            if (slice.dims > 1)
            {
                path.push_back(node.pole);
                node.children     = build(children[m], depth + 1, path);
                path.pop_back();
                node.multiplicity = 0;
                for (const auto& c : node.children)
                {
                    node.multiplicity += c.multiplicity;
                }
            }
            nodes.push_back(std::move(node));
        }
        return nodes;
    }
};

void collect_paths(const PoleNode& node, std::vector<Complex>& path,
                   std::vector<std::vector<Complex>>& out)
{
    path.push_back(node.pole);
    if (node.children.empty())
    {
        out.push_back(path);
    }
    for (const auto& c : node.children)
    {
        collect_paths(c, path, out);
    }
    path.pop_back();
}

void count_levels(const PoleNode& node, std::vector<std::size_t>& sizes)
{
    const auto level = static_cast<std::size_t>(node.depth - 1);
    if (sizes.size() <= level)
    {
        sizes.resize(level + 1, 0);
    }
    ++sizes[level];
    for (const auto& c : node.children)
    {
        count_levels(c, sizes);
    }
}

} // namespace

std::size_t PoleTree::leaf_count() const { return paths().size(); }

std::vector<std::size_t> PoleTree::level_sizes() const
{
    std::vector<std::size_t> sizes;
    for (const auto& r : roots)
    {
        count_levels(r, sizes);
    }
    return sizes;
}

std::vector<std::vector<Complex>> PoleTree::paths() const
{
    std::vector<std::vector<Complex>> out;
    std::vector<Complex> path;
    for (const auto& r : roots)
    {
        collect_paths(r, path, out);
    }
    return out;
}

DistinctPoles distinct_poles(std::span<const Complex> line, const RationalOptions& options,
                             double merge_tol)
{
    if (line.size() < 3 || line.size() % 2 == 0)
    {
        throw Error(ErrorCode::ShapeMismatch, "a line needs 2N + 1 samples");
    }
    const int N       = static_cast<int>(line.size() - 1) / 2;
    const auto points = integer_points(N);

    RationalOptions opts = options;
    if (opts.max_order == 0)
    {
        opts.max_order = static_cast<std::size_t>(N);
    }
    auto fit = fit_pole_residue(points, line, opts);
    check_fit(points, line, fit, opts.tol);

    double scale = 0.0;
    for (const auto& b : fit.pr.poles)
    {
        scale = std::max(scale, std::abs(b));
    }
    DistinctPoles out;
    for (const auto& b : fit.pr.poles)
    {
        const bool close = std::any_of(out.poles.begin(), out.poles.end(), [&](Complex q) {
            return std::abs(q - b) <= merge_tol * scale;
        });
        if (close)
        {
            ++out.merged;
        }
        else
        {
            out.poles.push_back(b);
        }
    }
    out.trace = std::move(fit.trace);
    return out;
}

std::vector<Complex> leading_line(const Slice& slice, int N)
{
    const std::size_t side = static_cast<std::size_t>(2 * N + 1);
    if (slice.dims < 1 || slice.values.size() != ipow(side, slice.dims))
    {
        throw Error(ErrorCode::ShapeMismatch, "slice size does not match its dimension");
    }
    const std::size_t tail   = ipow(side, slice.dims - 1);
    const std::size_t centre = (tail - 1) / 2;
    std::vector<Complex> line(side);
    for (std::size_t i = 0; i < side; ++i)
    {
        line[i] = slice.values[i * tail + centre];
    }
    return line;
}

std::vector<Slice> peel_dimension(std::span<const Complex> poles, const Slice& parent, int N,
                                  double rcond)
{
    const std::size_t side = static_cast<std::size_t>(2 * N + 1);
    if (parent.dims < 2 || parent.values.size() != ipow(side, parent.dims))
    {
        throw Error(ErrorCode::ShapeMismatch, "peeling needs a slice of dimension >= 2");
    }
    const auto mp = static_cast<Eigen::Index>(poles.size());
    if (mp == 0 || static_cast<std::size_t>(mp) > side)
    {
        throw Error(ErrorCode::IllConditioned,
                    std::to_string(mp) + " poles cannot be separated with " + std::to_string(side) + " samples");
    }

    ComplexMatrix cauchy(static_cast<Eigen::Index>(side), mp);
    for (std::size_t i = 0; i < side; ++i)
    {
        const double k = -N + static_cast<int>(i);
        for (Eigen::Index m = 0; m < mp; ++m)
        {
            cauchy(static_cast<Eigen::Index>(i), m) = 1.0 / (k - poles[static_cast<std::size_t>(m)]);
        }
    }
    const linalg::LeastSquares ls(cauchy, rcond);
    if (ls.rank() < mp)
    {
        throw Error(ErrorCode::IllConditioned,
                    "Cauchy system has numerical rank " + std::to_string(ls.rank()) + " < " + std::to_string(mp));
    }

    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto tail = static_cast<Eigen::Index>(ipow(side, parent.dims - 1));
    const Eigen::Map<const RowMajor> r(parent.values.data(), static_cast<Eigen::Index>(side), tail);
    RowMajor d(mp, tail);
    const ComplexMatrix& pinv = ls.pseudoinverse();

    // Columns are independent tails; chunk them across workers.
    parallel_for(static_cast<std::size_t>(tail), [&](std::size_t begin, std::size_t end) {
        const auto b = static_cast<Eigen::Index>(begin);
        const auto n = static_cast<Eigen::Index>(end - begin);
        d.middleCols(b, n).noalias() = pinv * r.middleCols(b, n);
    });

    std::vector<Slice> out(static_cast<std::size_t>(mp));
    for (Eigen::Index m = 0; m < mp; ++m)
    {
        out[static_cast<std::size_t>(m)].dims = parent.dims - 1;
        out[static_cast<std::size_t>(m)].values.assign(d.row(m).data(), d.row(m).data() + tail);
    }
    return out;
}

TreeBuild build_pole_tree(const CoefficientSource& source, const RecursiveConfig& config)
{
    if (!source.is_full_grid())
    {
        throw Error(ErrorCode::CoverageMismatch, "recursive recovery needs a full grid");
    }
    source.require_complete();

    Builder builder{config, config.rational, source.half_width(), {}};
    if (builder.options.max_order == 0)
    {
        builder.options.max_order = static_cast<std::size_t>(source.half_width());
    }
    const Slice root{source.dimension(), source.grid_values()};
    std::vector<Complex> path;

    TreeBuild out;
    out.tree.d     = source.dimension();
    out.tree.roots = builder.build(root, 1, path);
    out.traces     = std::move(builder.traces);
    return out;
}

ExponentialSum leaves_to_sum(const PoleTree& tree, const CoefficientSource& source,
                             const RecursiveConfig& config)
{
    if (!source.is_full_grid())
    {
        throw Error(ErrorCode::CoverageMismatch, "amplitude recovery needs a full grid");
    }
    const int d            = source.dimension();
    const int N            = source.half_width();
    const double P         = source.period();
    const std::size_t side = static_cast<std::size_t>(2 * N + 1);
    const auto paths       = tree.paths();
    const auto M           = static_cast<Eigen::Index>(paths.size());
    if (M == 0 || tree.d != d)
    {
        throw Error(ErrorCode::InvalidArgument, "pole tree is empty or of the wrong dimension");
    }
    for (const auto& p : paths)
    {
        if (static_cast<int>(p.size()) != d)
        {
            throw Error(ErrorCode::InvalidArgument, "pole tree path shorter than the dimension");
        }
    }

    // inv[l](i, j) = 1 / (k_i - b_jl)
    std::vector<ComplexMatrix> inv(static_cast<std::size_t>(d), ComplexMatrix(static_cast<Eigen::Index>(side), M));
    for (int l = 0; l < d; ++l)
    {
        for (std::size_t i = 0; i < side; ++i)
        {
            for (Eigen::Index j = 0; j < M; ++j)
            {
                inv[static_cast<std::size_t>(l)](static_cast<Eigen::Index>(i), j) =
                    1.0 / (static_cast<double>(static_cast<int>(i) - N) - paths[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)]);
            }
        }
    }
    const auto& grid   = source.grid_values();
    const std::size_t total = grid.size();

    auto row_of = [&](std::size_t flat, auto&& out) {
        out.setOnes();
        std::size_t rem = flat;
        for (int l = d - 1; l >= 0; --l)
        {
            const auto i = static_cast<Eigen::Index>(rem % side);
            rem /= side;
            out.array() *= inv[static_cast<std::size_t>(l)].row(i).transpose().array();
        }
    };

    std::vector<std::size_t> rows(total);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    if (total > config.max_rows)
    {
        const std::size_t keep = std::min<std::size_t>(20 * static_cast<std::size_t>(M), total);
        std::vector<double> norm(total);
        parallel_for(total, [&](std::size_t begin, std::size_t end) {
            ComplexVector r(M);
            for (std::size_t f = begin; f < end; ++f)
            {
                row_of(f, r);
                norm[f] = r.norm();
            }
        });
        std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) { return norm[a] > norm[b]; });
        rows.resize(keep);
        std::sort(rows.begin(), rows.end());
    }

    ComplexMatrix a(static_cast<Eigen::Index>(rows.size()), M);
    ComplexVector rhs(static_cast<Eigen::Index>(rows.size()));
    parallel_for(rows.size(), [&](std::size_t begin, std::size_t end) {
        ComplexVector r(M);
        for (std::size_t i = begin; i < end; ++i)
        {
            row_of(rows[i], r);
            a.row(static_cast<Eigen::Index>(i)) = r.transpose();
            rhs(static_cast<Eigen::Index>(i))   = grid[rows[i]];
        }
    });

    const linalg::LeastSquares ls(a, config.rational.rcond);
    if (ls.rank() < M)
    {
        throw Error(ErrorCode::IllConditioned,
                    "amplitude system has numerical rank " + std::to_string(ls.rank()) + " < " + std::to_string(M));
    }
    const ComplexVector amp = ls.solve(rhs);

    ComplexMatrix lambda(M, d);
    ComplexVector gamma(M);
    for (Eigen::Index j = 0; j < M; ++j)
    {
        Complex denom = 1.0;
        for (int l = 0; l < d; ++l)
        {
            lambda(j, l) = two_pi_i * paths[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] / P;
            denom *= (1.0 - std::exp(lambda(j, l) * P)) / two_pi_i;
        }
        gamma(j) = amp(j) / denom;
    }
    return ExponentialSum(std::move(lambda), std::move(gamma));
}

RecursiveRecovery recover_recursive(const CoefficientSource& source, const RecursiveConfig& config)
{
    auto built = build_pole_tree(source, config);
    RecursiveRecovery out{leaves_to_sum(built.tree, source, config), std::move(built.tree),
                          std::move(built.traces), 0.0, false};

    const int d            = source.dimension();
    const int N            = source.half_width();
    const auto& grid       = source.grid_values();
    double scale           = 0.0;
    for (const auto& c : grid)
    {
        scale = std::max(scale, std::abs(c));
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    const std::size_t side = static_cast<std::size_t>(2 * N + 1);
    MultiIndex k(static_cast<std::size_t>(d));
    for (std::size_t n = 0; n < config.check_points; ++n)
    {
        const std::size_t flat = pick(rng);
        std::size_t rem        = flat;
        for (int l = d - 1; l >= 0; --l)
        {
            k[static_cast<std::size_t>(l)] = static_cast<int>(rem % side) - N;
            rem /= side;
        }
        const Complex model = fourier_coefficient(out.sum, k, source.period());
        const double err    = scale > 0.0 ? std::abs(model - grid[flat]) / scale : std::abs(model - grid[flat]);
        out.resynthesis_residual = std::max(out.resynthesis_residual, err);
    }
    out.hidden_pole_suspected = out.resynthesis_residual > config.check_tol;
    return out;
}

} // namespace expanal
