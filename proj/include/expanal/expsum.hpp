#ifndef EXPANAL_EXPSUM_HPP
#define EXPANAL_EXPSUM_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace expanal
{

using Complex       = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using MultiIndex    = std::vector<int>;

inline constexpr Complex two_pi_i{0.0, 6.283185307179586476925286766559};

//
// f(t) = sum_j gamma_j exp(<lambda_j, t>) with an M x d frequency matrix and
// M nonzero coefficients. Frequency rows are pairwise distinct.
//
class ExponentialSum
{
public:
    ExponentialSum(ComplexMatrix frequencies, ComplexVector coefficients);

    int dimension() const noexcept { return static_cast<int>(lambda_.cols()); }
    int order() const noexcept { return static_cast<int>(lambda_.rows()); }

    const ComplexMatrix& frequencies() const noexcept { return lambda_; }
    const ComplexVector& coefficients() const noexcept { return gamma_; }

    Complex operator()(std::span<const double> t) const;

private:
    ComplexMatrix lambda_;
    ComplexVector gamma_;
};

/// Evaluates the sum at t (length d).
Complex evaluate(const ExponentialSum& sum, std::span<const double> t);

//
// Coverage descriptors
//
struct FullGrid
{
};

struct SparseLines
{
    int tau;
};

using Coverage = std::variant<FullGrid, SparseLines>;

/// "full" or "sparse:<tau>".
std::string coverage_to_string(const Coverage& coverage);
Coverage parse_coverage(const std::string& text);

struct IndexLine
{
    enum class Kind
    {
        Axis,
        Diagonal
    };

    Kind kind;
    /// Axis lines: the varying axis. Diagonal lines: the first of the two
    /// coupled axes (k on `axis`, k + 2 tau on `axis + 1`). Zero-based.
    int axis;
    std::vector<MultiIndex> indices;
};

/// The d axis lines (k = -N..N) followed by the d - 1 shifted diagonals
/// (k = -N..N - 2 tau). Indices repeat across lines where lines intersect.
std::vector<IndexLine> sparse_lines(int d, int N, int tau);

//
// Addressable supply of Fourier coefficients c_k on [-N, N]^d. Full-grid
// sources store a dense row-major array (first axis slowest); sparse sources
// store exactly the indices on their declared lines.
//
class CoefficientSource
{
public:
    CoefficientSource(int d, double period, int half_width, Coverage coverage);

    int dimension() const noexcept { return d_; }
    double period() const noexcept { return period_; }
    int half_width() const noexcept { return n_; }
    const Coverage& coverage() const noexcept { return coverage_; }
    bool is_full_grid() const noexcept;

    /// Whether k lies in the index set the coverage declares.
    bool covers(std::span<const int> k) const;
    bool contains(std::span<const int> k) const;

    void set(std::span<const int> k, Complex value);
    Complex at(std::span<const int> k) const;

    /// Number of distinct stored indices.
    std::size_t size() const;
    /// Distinct covered indices in the declared index set.
    std::size_t expected_size() const;
    /// Throws MissingCoefficient unless every covered index is stored.
    void require_complete() const;

    /// Sorted (index, value) pairs.
    std::vector<std::pair<MultiIndex, Complex>> entries() const;

    /// Dense row-major grid values; full-grid sources only.
    const std::vector<Complex>& grid_values() const;

    /// Records every index read via at() / grid_values() from now on.
    void start_audit() const;
    std::set<MultiIndex> audited_indices() const;

private:
    std::size_t flat_index(std::span<const int> k) const;
    void check_box(std::span<const int> k) const;
    void record(std::span<const int> k) const;
    void record_all() const;

    struct Audit;

    int d_;
    double period_;
    int n_;
    Coverage coverage_;
    std::vector<Complex> dense_;
    std::vector<char> present_;
    std::map<MultiIndex, Complex> sparse_;
    mutable std::shared_ptr<Audit> audit_;
};

/// One axis factor (e^{lambda P} - 1) / (lambda P - 2 pi i k); equals 1 when
/// lambda = 2 pi i k / P.
Complex axis_factor(Complex lambda, int k, double period);

/// Closed-form Fourier coefficient over [0, P]^d.
Complex fourier_coefficient(const ExponentialSum& sum, std::span<const int> k, double period);

/// Whether lambda P / (2 pi i) is an integer (to relative precision 1e-12).
bool is_degenerate_frequency(Complex lambda, double period);

/// Builds a coefficient source; throws DegenerateFrequency when some
/// lambda_{jl} = 2 pi i k / P for an integer k.
CoefficientSource synthesize(const ExponentialSum& sum, double period, int half_width,
                             const Coverage& coverage);

//
// Error metrics
//
struct ErrorOptions
{
    double box              = 10.0; // evaluation box [-box, box]^d
    int points_per_axis     = 51;
    std::size_t max_points  = 2'000'000; // applied for d >= 4
    std::uint64_t seed      = 0;
};

struct ErrorReport
{
    double e_lambda = 0.0;
    double e_gamma  = 0.0;
    double e_f      = 0.0;
    /// matched_permutation[j] = row of the reconstruction matched to truth row
    /// j, or -1 when that truth row is unmatched.
    std::vector<int> matched_permutation;
    bool order_mismatch = false;
};

/// Greedy nearest-neighbour bijection between frequency rows (Euclidean norm
/// over C^d); returns, for every truth row, the matched reconstruction row or -1.
std::vector<int> match_rows(const ComplexMatrix& truth, const ComplexMatrix& recon);

ErrorReport relative_errors(const ExponentialSum& truth, const ExponentialSum& recon,
                            const ErrorOptions& options = {});

/// Maximum of |f - g| and of |f| over the evaluation lattice.
std::pair<double, double> max_deviation(const ExponentialSum& f, const ExponentialSum& g,
                                        const ErrorOptions& options = {});

} // namespace expanal

#endif
