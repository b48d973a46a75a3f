#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <expanal/error.hpp>
#include <expanal/expsum.hpp>
#include <expanal/signals.hpp>

#include "support.hpp"

using namespace expanal;
using support::I;

namespace
{

ExponentialSum one_term(std::initializer_list<Complex> lambda, Complex gamma)
{
    ComplexMatrix l(1, static_cast<Eigen::Index>(lambda.size()));
    Eigen::Index i = 0;
    for (const auto& v : lambda)
    {
        l(0, i++) = v;
    }
    ComplexVector g(1);
    g << gamma;
    return ExponentialSum(l, g);
}

ErrorCode code_of(auto&& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return e.code();
    }
    FAIL("expected an expanal::Error");
    return ErrorCode::InvalidArgument;
}

ExponentialSum random_sum(std::mt19937_64& rng, int d, int M, double scale)
{
    ComplexMatrix l(M, d);
    ComplexVector g(M);
    for (int j = 0; j < M; ++j)
    {
        for (int k = 0; k < d; ++k)
        {
            l(j, k) = support::random_complex(rng, scale);
        }
        g(j) = support::random_gamma(rng);
    }
    return ExponentialSum(l, g);
}

} // namespace

TEST_CASE("exponential sum invariants")
{
    ComplexMatrix l(2, 1);
    l << I, I;
    CHECK(code_of([&] { ExponentialSum(l, ComplexVector::Ones(2)); }) == ErrorCode::InvalidArgument);
    ComplexMatrix l1(1, 1);
    l1 << I;
    CHECK(code_of([&] { ExponentialSum(l1, ComplexVector::Zero(1)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { ExponentialSum(l1, ComplexVector::Ones(2)); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("evaluate: constant exponent")
{
    const auto s     = one_term({0.0, 0.0, 0.0}, 1.0);
    const double t[] = {0.3, -7.0, 12.5};
    CHECK(evaluate(s, t) == Complex(1.0));
}

TEST_CASE("evaluate: conjugate pair gives -2 at pi")
{
    ComplexMatrix l(2, 2);
    l << I, 0.0, -I, 0.0;
    const ExponentialSum s(l, ComplexVector::Ones(2));
    const double t[] = {std::numbers::pi, 0.0};
    CHECK(std::abs(evaluate(s, t) - Complex(-2.0)) < 1e-15);
}

TEST_CASE("evaluate: f1 at the origin is the coefficient sum")
{
    const double t[] = {0.0, 0.0};
    CHECK(std::abs(evaluate(signals::f1(), t) - Complex(9.0)) < 1e-14);
}

TEST_CASE("fourier_coefficient examples")
{
    const int k0[] = {0};
    CHECK(fourier_coefficient(one_term({0.0}, 2.0), k0, 1.0) == Complex(2.0));
    const int k3[] = {3};
    CHECK(fourier_coefficient(one_term({0.0}, 1.0), k3, 1.0) == Complex(0.0));

    const auto s    = one_term({1.0, 1.0}, 1.0);
    const int kk[]  = {0, 0};
    const Complex c = fourier_coefficient(s, kk, 1.0);
    const Complex q = support::quadrature_coefficient(s, {0, 0}, 1.0);
    CHECK(std::abs(c - q) < 1e-10);
    CHECK(c.real() == doctest::Approx(2.9524924).epsilon(1e-7));
    CHECK(std::abs(c.imag()) < 1e-15);
}

TEST_CASE("fourier_coefficient matches quadrature on random small sums")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        const int d      = 1 + static_cast<int>(rng() % 2);
        const int M      = 1 + static_cast<int>(rng() % 3);
        const double P   = support::uniform(rng, 0.5, 3.0);
        const auto s     = random_sum(rng, d, M, 2.0);
        std::vector<int> k;
        for (int l = 0; l < d; ++l)
        {
            k.push_back(static_cast<int>(rng() % 11) - 5);
        }
        const Complex closed = fourier_coefficient(s, k, P);
        const Complex quad   = support::quadrature_coefficient(s, k, P);
        CHECK(std::abs(closed - quad) <= 1e-8);
    }
}

TEST_CASE("fourier_coefficient is linear in the coefficients")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial)
    {
        const auto f       = random_sum(rng, 2, 3, 1.5);
        const auto g       = random_sum(rng, 2, 2, 1.5);
        const Complex a    = support::random_complex(rng);
        const Complex b    = support::random_complex(rng);
        ComplexMatrix l(5, 2);
        l << f.frequencies(), g.frequencies();
        ComplexVector gamma(5);
        gamma << a * f.coefficients(), b * g.coefficients();
        const ExponentialSum h(l, gamma);
        const int k[]      = {static_cast<int>(rng() % 7) - 3, static_cast<int>(rng() % 7) - 3};
        const Complex lhs  = fourier_coefficient(h, k, 2.0);
        const Complex rhs  = a * fourier_coefficient(f, k, 2.0) + b * fourier_coefficient(g, k, 2.0);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("degenerate frequencies")
{
    CHECK(is_degenerate_frequency(0.0, 1.0));
    CHECK(is_degenerate_frequency(two_pi_i * 3.0 / 2.0, 2.0));
    CHECK_FALSE(is_degenerate_frequency(two_pi_i * 3.5 / 2.0, 2.0));
    CHECK(axis_factor(two_pi_i * 3.0, 3, 1.0) == Complex(1.0));

    const auto s = one_term({0.0, I}, 1.0);
    CHECK(code_of([&] { synthesize(s, 1.0, 4, FullGrid{}); }) == ErrorCode::DegenerateFrequency);
}

TEST_CASE("synthesize f1 on the sparse lines")
{
    const auto src = synthesize(signals::f1(), 4.0, 15, SparseLines{7});
    // 31 + 31 + 17 per line. Stored once: the origin, and the diagonal's
    // crossings (-14, 0) and (0, 14) with the axis lines.
    std::size_t per_line = 0;
    for (const auto& line : sparse_lines(2, 15, 7))
    {
        per_line += line.indices.size();
        for (const auto& k : line.indices)
        {
            CHECK(src.at(k) == fourier_coefficient(signals::f1(), k, 4.0));
        }
    }
    CHECK(per_line == 79);
    CHECK(src.size() == src.expected_size());
    CHECK(src.size() == 76);
    const int off[] = {1, 1};
    CHECK_FALSE(src.covers(off));
    CHECK(code_of([&] { (void)src.at(off); }) == ErrorCode::MissingCoefficient);
}

TEST_CASE("synthesize f2 on the full grid against quadrature")
{
    const auto f2  = signals::f2();
    const auto src = synthesize(f2, 5.0, 15, FullGrid{});
    CHECK(src.size() == 31u * 31u * 31u);
    std::mt19937_64 rng(13);
    for (int n = 0; n < 5; ++n)
    {
        std::vector<int> k;
        for (int l = 0; l < 3; ++l)
        {
            k.push_back(static_cast<int>(rng() % 31) - 15);
        }
        const Complex want = support::separable_quadrature_coefficient(f2, k, 5.0);
        CHECK(std::abs(src.at(k) - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("synthesize is bit-identical to fourier_coefficient")
{
    std::mt19937_64 rng(14);
    const auto s   = random_sum(rng, 3, 4, 1.0);
    const auto src = synthesize(s, 1.7, 4, FullGrid{});
    for (const auto& [k, c] : src.entries())
    {
        REQUIRE(c == fourier_coefficient(s, k, 1.7));
    }
}

TEST_CASE("coverage strings")
{
    CHECK(coverage_to_string(FullGrid{}) == "full");
    CHECK(coverage_to_string(SparseLines{4}) == "sparse:4");
    CHECK(std::get<SparseLines>(parse_coverage("sparse:12")).tau == 12);
    CHECK(std::holds_alternative<FullGrid>(parse_coverage("full")));
    CHECK(code_of([] { parse_coverage("sparse:"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_coverage("sparse:0"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_coverage("dense"); }) == ErrorCode::ParseError);
}

TEST_CASE("coefficient source bookkeeping")
{
    CoefficientSource src(2, 1.0, 3, SparseLines{1});
    const int on_diag[] = {-3, -1};
    const int outside[] = {4, 0};
    const int off[]     = {1, 2};
    CHECK(src.covers(on_diag));
    CHECK_FALSE(src.covers(outside));
    CHECK(code_of([&] { src.set(off, 1.0); }) == ErrorCode::CoverageMismatch);
    src.set(on_diag, Complex(1.0, 2.0));
    CHECK(src.at(on_diag) == Complex(1.0, 2.0));
    CHECK(code_of([&] { src.require_complete(); }) == ErrorCode::MissingCoefficient);

    src.start_audit();
    (void)src.at(on_diag);
    CHECK(src.audited_indices() == std::set<MultiIndex>{{-3, -1}});
}

TEST_CASE("relative_errors: identity and permutation")
{
    const auto f1 = signals::f1();
    auto r        = relative_errors(f1, f1);
    CHECK(r.e_lambda == 0.0);
    CHECK(r.e_gamma == 0.0);
    CHECK(r.e_f == 0.0);
    CHECK_FALSE(r.order_mismatch);

    Eigen::PermutationMatrix<Eigen::Dynamic> p(5);
    p.indices() << 3, 0, 4, 1, 2;
    const ExponentialSum shuffled(p * f1.frequencies(), p * f1.coefficients());
    r = relative_errors(f1, shuffled);
    CHECK(r.e_lambda == 0.0);
    CHECK(r.e_gamma == 0.0);
    CHECK(r.e_f <= 1e-15);
    for (int j = 0; j < 5; ++j)
    {
        CHECK(shuffled.frequencies().row(r.matched_permutation[static_cast<std::size_t>(j)]) == f1.frequencies().row(j));
    }
}

TEST_CASE("relative_errors is zero exactly when matched rows agree")
{
    const auto f1 = signals::f1();
    ComplexMatrix l = f1.frequencies();
    l(2, 1) += 1e-9;
    const auto r = relative_errors(f1, ExponentialSum(l, f1.coefficients()));
    CHECK(r.e_lambda > 0.0);
    CHECK(r.e_lambda == doctest::Approx(1e-9 / 9.44).epsilon(1e-6));
    CHECK(r.e_gamma == 0.0);
    CHECK(r.e_f > 0.0);
}

TEST_CASE("relative_errors flags an order mismatch and scores the matched rows")
{
    const auto f1 = signals::f1();
    const ExponentialSum fewer(f1.frequencies().topRows(4), f1.coefficients().head(4));
    const auto r = relative_errors(f1, fewer);
    CHECK(r.order_mismatch);
    CHECK(r.e_lambda == 0.0);
    CHECK(r.e_gamma == 0.0);
    CHECK(std::count(r.matched_permutation.begin(), r.matched_permutation.end(), -1) == 1);
}

TEST_CASE("e(f) subsampling in high dimension is seeded")
{
    std::mt19937_64 rng(15);
    const auto s = random_sum(rng, 4, 2, 0.2);
    ComplexMatrix l = s.frequencies();
    l(0, 0) += 1e-6;
    const ExponentialSum t(l, s.coefficients());
    ErrorOptions small;
    small.max_points = 1000;
    const auto a = relative_errors(s, t, small);
    const auto b = relative_errors(s, t, small);
    CHECK(a.e_f == b.e_f);
    CHECK(a.e_f > 0.0);
}
