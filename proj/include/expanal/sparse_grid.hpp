#ifndef EXPANAL_SPARSE_GRID_HPP
#define EXPANAL_SPARSE_GRID_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <expanal/expsum.hpp>
#include <expanal/rational.hpp>

namespace expanal
{

struct SparseGridPlan
{
    int d   = 0;
    int N   = 0;
    int tau = 0;
    std::vector<IndexLine> axis_lines;     // d lines, 2N + 1 indices each
    std::vector<IndexLine> diagonal_lines; // d - 1 lines, 2N + 1 - 2 tau indices each

    /// Per-line count, duplicates included: d (2N + 1) + (d - 1)(2N + 1 - 2 tau).
    std::size_t total_count() const;
    std::size_t distinct_count() const;
};

/// Throws BadParameters unless d >= 1, tau >= 1 and N - tau >= 1.
SparseGridPlan plan(int d, int N, int tau);

struct AxisRecovery
{
    int axis = 0;
    std::vector<Complex> poles;  // sorted by (real, imag)
    std::vector<Complex> coeffs; // A_{jm}, following the poles
    AaaTrace trace;
};

/// Univariate fit of one axis line (k = -N..N). When expected_order > 0 the
/// fit runs with max_order = expected_order + 1 and any other pole count
/// raises AxisOrderMismatch.
AxisRecovery recover_axis(int axis, std::span<const Complex> values, const RationalOptions& options,
                          std::size_t expected_order = 0);

/// Least squares partial-fraction coefficients on a diagonal line:
///   sum_j c1_j / (k - prev_j) + sum_j c2_j / (k - (next_j - 2 tau)) = r(k),
/// k = -N..N - 2 tau. Returns (c1, c2) stacked, length 2M.
std::vector<Complex> pairing_system(std::span<const Complex> poles_prev,
                                    std::span<const Complex> poles_next,
                                    std::span<const Complex> diagonal_values, int N, int tau,
                                    double rcond = linalg::default_rcond);

/// Pairing score of previous-axis row j against next-axis row k.
Eigen::MatrixXd pairing_scores(std::span<const Complex> c, std::span<const Complex> coeffs_prev,
                               std::span<const Complex> poles_prev,
                               std::span<const Complex> poles_next, int tau);

struct PairingStage
{
    int axis = 0; // pairs axis - 1 with axis
    std::vector<int> permutation;      // previous row j -> next-axis row
    std::vector<Complex> c;            // pairing_system output
    std::vector<double> matched_score; // per row
    std::vector<double> runner_up;     // best unmatched score per row
};

struct PairingOptions
{
    double accept = 1e-6; // every matched score must stay below this
    double margin = 10.0; // runner-up must score at least margin times worse
};

/// Bijection minimizing the total score (Hungarian for M <= 64, greedy
/// above). Throws AmbiguousPairing when the certificate test fails.
PairingStage match_pairs(std::span<const Complex> c, std::span<const Complex> coeffs_prev,
                         std::span<const Complex> poles_prev, std::span<const Complex> poles_next,
                         int tau, const PairingOptions& options = {});

struct PairingCertificate
{
    std::vector<PairingStage> stages;
};

struct SparseConfig
{
    int tau = 0; // 0 takes tau from the source coverage
    RationalOptions rational;
    PairingOptions pairing;
};

struct SparseRecovery
{
    ExponentialSum sum;
    PairingCertificate certificate;
    std::vector<AxisRecovery> axes;
};

SparseRecovery recover_sparse(const CoefficientSource& source, const SparseConfig& config = {});

} // namespace expanal

#endif
