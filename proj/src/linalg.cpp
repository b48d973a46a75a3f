#include <expanal/error.hpp>
#include <expanal/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace expanal::linalg
{

void require_finite(const ComplexMatrix& a, const char* what)
{
    if (!a.allFinite())
    {
        throw Error(ErrorCode::NonFinite,
                    std::string(what) + " contains NaN or infinite entries");
    }
}

namespace
{

using JacobiSvd = Eigen::JacobiSVD<ComplexMatrix, Eigen::ColPivHouseholderQRPreconditioner>;

void require_nonempty(const ComplexMatrix& a, const char* what)
{
    if (a.rows() == 0 || a.cols() == 0)
    {
        throw Error(ErrorCode::ShapeMismatch, std::string(what) + " is empty");
    }
}

} // namespace

Svd svd(const ComplexMatrix& a)
{
    require_nonempty(a, "svd input");
    require_finite(a, "svd input");

    JacobiSvd solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success)
    {
        throw Error(ErrorCode::ConvergenceFailure, "SVD iteration did not converge");
    }
    return Svd{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

ComplexVector smallest_right_singular_vector(const ComplexMatrix& a)
{
    require_nonempty(a, "svd input");
    require_finite(a, "svd input");

    // Full V so that wide matrices still expose a null vector in the last column.
    JacobiSvd solver(a, Eigen::ComputeFullV);
    if (solver.info() != Eigen::Success)
    {
        throw Error(ErrorCode::ConvergenceFailure, "SVD iteration did not converge");
    }
    return solver.matrixV().col(a.cols() - 1);
}

LeastSquares::LeastSquares(const ComplexMatrix& a, double rcond)
    : rows_(a.rows()), cols_(a.cols()), rank_(0)
{
    if (!(rcond > 0.0 && rcond < 1.0))
    {
        throw Error(ErrorCode::InvalidArgument, "rcond must lie in (0, 1)");
    }
    const Svd f = svd(a);
    sigma_      = f.sigma;

    const double cutoff = sigma_.size() > 0 ? rcond * sigma_(0) : 0.0;
    while (rank_ < sigma_.size() && sigma_(rank_) > cutoff && sigma_(rank_) > 0.0)
    {
        ++rank_;
    }

    pinv_ = ComplexMatrix::Zero(cols_, rows_);
    if (rank_ > 0)
    {
        const auto u = f.u.leftCols(rank_);
        const auto v = f.v.leftCols(rank_);
        pinv_.noalias() =
            v * sigma_.head(rank_).cwiseInverse().asDiagonal() * u.adjoint();
    }
}

ComplexVector LeastSquares::solve(const ComplexVector& b) const
{
    if (b.size() != rows_)
    {
        throw Error(ErrorCode::ShapeMismatch,
                    "right-hand side has " + std::to_string(b.size()) +
                        " entries, expected " + std::to_string(rows_));
    }
    return pinv_ * b;
}

ComplexMatrix LeastSquares::solve(const ComplexMatrix& b) const
{
    if (b.rows() != rows_)
    {
        throw Error(ErrorCode::ShapeMismatch,
                    "right-hand side has " + std::to_string(b.rows()) +
                        " rows, expected " + std::to_string(rows_));
    }
    return pinv_ * b;
}

ComplexVector lstsq(const ComplexMatrix& a, const ComplexVector& b, double rcond)
{
    if (a.rows() != b.size())
    {
        throw Error(ErrorCode::ShapeMismatch,
                    "lstsq: matrix has " + std::to_string(a.rows()) +
                        " rows but right-hand side has " + std::to_string(b.size()));
    }
    require_finite(b, "lstsq right-hand side");
    return LeastSquares(a, rcond).solve(b);
}

std::vector<GeneralizedEigenvalue> gen_eig(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    {
        throw Error(ErrorCode::ShapeMismatch, "gen_eig needs two square matrices of equal size");
    }
    require_finite(a, "gen_eig A");
    require_finite(b, "gen_eig B");

    const auto n = static_cast<lapack_int>(a.rows());
    if (n == 0)
    {
        return {};
    }

    ComplexMatrix aw = a; // zggev overwrites its inputs
    ComplexMatrix bw = b;
    ComplexVector alpha(n);
    ComplexVector beta(n);
    Complex dummy{};

    const lapack_int info =
        LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'N', n, aw.data(), n, bw.data(), n,
                      alpha.data(), beta.data(), &dummy, 1, &dummy, 1);
    if (info < 0)
    {
        throw Error(ErrorCode::InvalidArgument,
                    "zggev rejected argument " + std::to_string(-info));
    }
    if (info > 0)
    {
        throw Error(ErrorCode::ConvergenceFailure,
                    "QZ iteration failed (zggev info " + std::to_string(info) + ")");
    }

    double beta_max = 0.0;
    for (lapack_int i = 0; i < n; ++i)
    {
        beta_max = std::max(beta_max, std::abs(beta(i)));
    }

    std::vector<GeneralizedEigenvalue> out;
    out.reserve(static_cast<std::size_t>(n));
    for (lapack_int i = 0; i < n; ++i)
    {
        const bool infinite = std::abs(beta(i)) <= infinite_beta_threshold * beta_max;
        out.push_back({alpha(i), beta(i), infinite});
    }
    return out;
}

std::vector<Complex> finite_eigenvalues(const ComplexMatrix& a, const ComplexMatrix& b)
{
    std::vector<Complex> out;
    for (const auto& e : gen_eig(a, b))
    {
        if (!e.infinite)
        {
            out.push_back(e.value());
        }
    }
    return out;
}

} // namespace expanal::linalg
