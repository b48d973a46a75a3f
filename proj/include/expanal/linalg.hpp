#ifndef EXPANAL_LINALG_HPP
#define EXPANAL_LINALG_HPP

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace expanal::linalg
{

using Index         = Eigen::Index;
using Complex       = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector    = Eigen::VectorXd;

/// Relative singular-value cutoff used for exact-data least squares.
inline constexpr double default_rcond = 1e-13;

/// A QZ pair (alpha, beta) is reported infinite when
/// |beta| <= infinite_beta_threshold * max |beta| over the pencil.
inline constexpr double infinite_beta_threshold = 1e-12;

/// Throws Error(NonFinite) if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& a, const char* what);

struct Svd
{
    ComplexMatrix u;  // m x r, r = min(m, n)
    RealVector sigma; // descending
    ComplexMatrix v;  // n x r
};

/// Thin SVD, A = U diag(sigma) V^*.
Svd svd(const ComplexMatrix& a);

/// Right singular vector belonging to the smallest singular value. For wide
/// matrices this is a unit vector of the null space.
ComplexVector smallest_right_singular_vector(const ComplexMatrix& a);

//
// Truncated-SVD least squares factorization. Singular values below
// rcond * sigma[0] are discarded, which gives the minimum-norm minimizer over
// the numerical row space. Factor once, solve for many right-hand sides.
//
class LeastSquares
{
public:
    LeastSquares(const ComplexMatrix& a, double rcond = default_rcond);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Index rank() const noexcept { return rank_; }
    const RealVector& singular_values() const noexcept { return sigma_; }

    ComplexVector solve(const ComplexVector& b) const;
    ComplexMatrix solve(const ComplexMatrix& b) const;

    /// The pseudoinverse restricted to the numerical rank (cols x rows).
    const ComplexMatrix& pseudoinverse() const noexcept { return pinv_; }

private:
    Index rows_;
    Index cols_;
    Index rank_;
    RealVector sigma_;
    ComplexMatrix pinv_;
};

ComplexVector lstsq(const ComplexMatrix& a, const ComplexVector& b,
                    double rcond = default_rcond);

struct GeneralizedEigenvalue
{
    Complex alpha;
    Complex beta;
    bool infinite;

    /// alpha / beta; meaningless when infinite.
    Complex value() const { return alpha / beta; }
};

/// All generalized eigenvalues of A v = z B v (QZ via LAPACK zggev).
std::vector<GeneralizedEigenvalue> gen_eig(const ComplexMatrix& a,
                                           const ComplexMatrix& b);

/// Finite eigenvalues only, in the order returned by gen_eig.
std::vector<Complex> finite_eigenvalues(const ComplexMatrix& a,
                                        const ComplexMatrix& b);

} // namespace expanal::linalg

#endif
