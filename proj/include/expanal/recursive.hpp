#ifndef EXPANAL_RECURSIVE_HPP
#define EXPANAL_RECURSIVE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <expanal/expsum.hpp>
#include <expanal/rational.hpp>

namespace expanal
{

struct PoleNode
{
    Complex pole;
    int depth = 0; // 1-based dimension index
    std::vector<PoleNode> children;
    /// Number of leaves below (1 at a leaf).
    std::size_t multiplicity = 1;
};

struct PoleTree
{
    int d = 0;
    std::vector<PoleNode> roots;

    std::size_t leaf_count() const;
    /// Node count per depth, index 0 holding the roots.
    std::vector<std::size_t> level_sizes() const;
    /// Root-to-leaf pole paths in depth-first order.
    std::vector<std::vector<Complex>> paths() const;
};

//
// Values of a (d - depth)-variate slice on [-N, N]^{d - depth}, row-major with
// the leading remaining axis slowest.
//
struct Slice
{
    int dims = 0;
    std::vector<Complex> values;
};

struct DistinctPoles
{
    std::vector<Complex> poles; // sorted by (real, imag)
    AaaTrace trace;
    std::size_t merged = 0; // poles folded into a near neighbour
};

/// AAA on one line (k = -N..N) followed by a merge of poles closer than
/// merge_tol * max|pole|.
DistinctPoles distinct_poles(std::span<const Complex> line, const RationalOptions& options,
                             double merge_tol = 1e-8);

/// Values of the slice along its leading axis with every other index 0.
std::vector<Complex> leading_line(const Slice& slice, int N);

/// Splits a slice into one child per pole by solving
///   sum_m d_m(tail) / (k - b_m) = r(k, tail),  k = -N..N,
/// for every tail with a single factorization of the Cauchy matrix.
std::vector<Slice> peel_dimension(std::span<const Complex> poles, const Slice& parent, int N,
                                  double rcond = linalg::default_rcond);

struct RecursiveConfig
{
    RationalOptions rational; // max_order 0 selects N per branch
    double merge_tol = 1e-8;
    /// Spurious-pole residue floor for fits below the first dimension. Peeled
    /// slices inherit the parent's pole error, which AAA otherwise fits with
    /// extra poles of tiny residue.
    double branch_froissart = 1e-8;
    /// Above this many grid points the amplitude system keeps only
    /// min(20 M, rows) rows of largest norm.
    std::size_t max_rows = 1'000'000;
    std::size_t check_points = 100;
    double check_tol         = 1e-8;
    std::uint64_t seed       = 0;
};

struct TreeBuild
{
    PoleTree tree;
    std::vector<AaaTrace> traces; // depth-first order of the fits
};

TreeBuild build_pole_tree(const CoefficientSource& source, const RecursiveConfig& config = {});

/// Frequencies from the root-to-leaf paths, amplitudes from the full-grid
/// least squares system, coefficients from the amplitudes.
ExponentialSum leaves_to_sum(const PoleTree& tree, const CoefficientSource& source,
                             const RecursiveConfig& config = {});

struct RecursiveRecovery
{
    ExponentialSum sum;
    PoleTree tree;
    std::vector<AaaTrace> traces;
    /// Largest relative mismatch at the random check indices.
    double resynthesis_residual = 0.0;
    /// Set when the residual exceeds check_tol, which points at a pole that
    /// no axis-line fit could see.
    bool hidden_pole_suspected = false;
};

RecursiveRecovery recover_recursive(const CoefficientSource& source, const RecursiveConfig& config = {});

} // namespace expanal

#endif
