#ifndef EXPANAL_RATIONAL_HPP
#define EXPANAL_RATIONAL_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <expanal/expsum.hpp>
#include <expanal/linalg.hpp>

namespace expanal
{

//
// r(z) = sum_s w_s f_s / (z - z_s)  /  sum_s w_s / (z - z_s)
//
struct BarycentricForm
{
    std::vector<Complex> support;
    std::vector<Complex> values;
    std::vector<Complex> weights;

    std::size_t size() const noexcept { return support.size(); }
    Complex operator()(Complex z) const;
};

Complex evaluate_barycentric(const BarycentricForm& form, Complex z);

struct AaaTrace
{
    std::size_t iterations = 0;
    std::vector<double> max_residual_history;
    std::vector<std::size_t> chosen_support_order;
    bool converged = false;
};

struct AaaResult
{
    BarycentricForm form;
    AaaTrace trace;
};

/// Greedy AAA fit. Stops once the maximum residual over the non-support
/// points is <= tol * max|values| or the support reaches max_order points.
/// A non-converged fit is returned with trace.converged == false.
AaaResult aaa_fit(std::span<const Complex> points, std::span<const Complex> values,
                  double tol, std::size_t max_order);

/// Finite poles of the barycentric form from the arrowhead pencil, sorted by
/// (real, imag).
std::vector<Complex> poles_of(const BarycentricForm& form);

struct LoewnerMatrices
{
    ComplexMatrix l0; // (c_l - c_s) / (k_l - k_s)
    ComplexMatrix l1; // (k_l c_l - k_s c_s) / (k_l - k_s)
};

/// Loewner and shifted Loewner matrices for the partition given by the
/// support indices (columns) and every other point (rows, ascending).
LoewnerMatrices loewner_matrices(std::span<const Complex> points, std::span<const Complex> values,
                                 std::span<const std::size_t> support);

struct PencilOptions
{
    double tol   = 1e-12;
    double rcond = 1e-13; // numerical-rank cutoff for L(0)
};

/// Poles as eigenvalues of z L(0) - L(1), with the support chosen by an
/// order-M AAA run and the pencil projected to M x M through the rank-M
/// left singular subspace of L(0). Sorted by (real, imag).
std::vector<Complex> loewner_pencil_poles(std::span<const Complex> points,
                                          std::span<const Complex> values, std::size_t order,
                                          const PencilOptions& options = {});

/// Least squares residues of sum_j a_j / (k - b_j) = c_k.
std::vector<Complex> residues_ls(std::span<const Complex> poles, std::span<const Complex> points,
                                 std::span<const Complex> values,
                                 double rcond = linalg::default_rcond);

struct PoleResidue
{
    std::vector<Complex> poles;
    std::vector<Complex> residues;

    std::size_t size() const noexcept { return poles.size(); }
    Complex operator()(Complex z) const;
};

/// Sorts by (real, imag) of the poles; residues follow their poles.
void sort_by_pole(PoleResidue& pr);

/// Lexicographic (real, imag) order used for every pole list.
bool pole_less(Complex a, Complex b);

enum class PoleMethod
{
    Eigenproblem,
    LoewnerPencil,
};

struct RationalOptions
{
    double tol = 1e-12;
    /// Maximum support size; 0 selects min(N, 100) with N = (points - 1) / 2.
    std::size_t max_order = 0;
    PoleMethod method     = PoleMethod::Eigenproblem;
    /// Poles with |a_j| < froissart * max|a| are dropped and residues refit.
    double froissart = 1e-12;
    double rcond     = linalg::default_rcond;
};

struct PoleResidueFit
{
    PoleResidue pr; // sorted by pole
    AaaTrace trace;
    BarycentricForm form;
    std::size_t dropped = 0; // spurious poles removed
};

/// AAA, pole extraction, residues and the spurious-pole filter. Does not throw
/// on non-convergence; inspect fit.trace.converged.
PoleResidueFit fit_pole_residue(std::span<const Complex> points, std::span<const Complex> values,
                                const RationalOptions& options = {});

std::vector<Complex> integer_points(int N);

/// Validates a fit on integer sample points. Throws NoConvergence when AAA did
/// not converge or the pole-residue form misses most samples, and
/// DegenerateFrequency when a pole sits on a sample index or a few isolated
/// samples fall off the rational structure.
void check_fit(std::span<const Complex> points, std::span<const Complex> values,
               const PoleResidueFit& fit, double tol);

struct UnivariateRecovery
{
    ExponentialSum sum;
    PoleResidueFit fit;
};

/// Full univariate pipeline on c_k, k = -N..N; lambda = 2 pi i b / P,
/// gamma = 2 pi i a / (1 - e^{lambda P}).
UnivariateRecovery recover_univariate(const CoefficientSource& source,
                                      const RationalOptions& options = {});

} // namespace expanal

#endif
