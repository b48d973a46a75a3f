#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include <expanal/error.hpp>
#include <expanal/linalg.hpp>

#include "support.hpp"

using namespace expanal;
using namespace expanal::linalg;

namespace
{

ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c)
{
    ComplexMatrix a(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
    {
        for (Eigen::Index j = 0; j < c; ++j)
        {
            a(i, j) = support::random_complex(rng);
        }
    }
    return a;
}

ComplexVector random_vector(std::mt19937_64& rng, Eigen::Index n)
{
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        v(i) = support::random_complex(rng);
    }
    return v;
}

std::vector<Complex> sorted(std::vector<Complex> v)
{
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return v;
}

// Largest distance from an oracle value to the nearest computed value,
// relative to max(1, |oracle value|).
double nearest_gap(const std::vector<Complex>& got, const std::vector<Complex>& want)
{
    double worst = 0.0;
    for (const auto& w : want)
    {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : got)
        {
            best = std::min(best, std::abs(g - w));
        }
        worst = std::max(worst, best / std::max(1.0, std::abs(w)));
    }
    return worst;
}

} // namespace

TEST_CASE("svd of the identity and of zero")
{
    const auto id = svd(ComplexMatrix::Identity(3, 3));
    CHECK(id.sigma.size() == 3);
    for (Eigen::Index i = 0; i < 3; ++i)
    {
        CHECK(id.sigma(i) == doctest::Approx(1.0).epsilon(1e-15));
    }
    const auto z = svd(ComplexMatrix::Zero(2, 2));
    CHECK(z.sigma(0) == 0.0);
    CHECK(z.sigma(1) == 0.0);
}

TEST_CASE("svd multiplies back and is ordered")
{
    std::mt19937_64 rng(1);
    const auto a = random_matrix(rng, 4, 2);
    const auto f = svd(a);
    const ComplexMatrix back = f.u * f.sigma.asDiagonal() * f.v.adjoint();
    CHECK((back - a).cwiseAbs().maxCoeff() <= 1e-12 * f.sigma(0));
    CHECK(f.sigma(0) >= f.sigma(1));
    CHECK((f.u.adjoint() * f.u - ComplexMatrix::Identity(2, 2)).norm() < 1e-13);
    CHECK((f.v.adjoint() * f.v - ComplexMatrix::Identity(2, 2)).norm() < 1e-13);
}

TEST_CASE("svd reconstruction on random matrices up to 64 x 64")
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto r = static_cast<Eigen::Index>(1 + rng() % 64);
        const auto c = static_cast<Eigen::Index>(1 + rng() % 64);
        const auto a = random_matrix(rng, r, c);
        const auto f = svd(a);
        const ComplexMatrix back = f.u * f.sigma.asDiagonal() * f.v.adjoint();
        CHECK((a - back).norm() <= 1e-12 * a.norm());
        for (Eigen::Index i = 1; i < f.sigma.size(); ++i)
        {
            CHECK(f.sigma(i - 1) >= f.sigma(i));
        }
    }
}

TEST_CASE("svd rejects empty and non-finite input")
{
    CHECK_THROWS_AS(svd(ComplexMatrix(0, 3)), Error);
    ComplexMatrix a = ComplexMatrix::Identity(2, 2);
    a(0, 1)         = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    try
    {
        svd(a);
        FAIL("expected NonFinite");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::NonFinite);
    }
}

TEST_CASE("lstsq on the identity")
{
    ComplexVector b(3);
    b << 1.0, Complex(0, 2), -1.0;
    const auto x = lstsq(ComplexMatrix::Identity(3, 3), b);
    CHECK((x - b).norm() == doctest::Approx(0.0));
}

TEST_CASE("lstsq recovers the solution of a consistent overdetermined system")
{
    std::mt19937_64 rng(3);
    const auto a  = random_matrix(rng, 4, 2);
    const auto x0 = random_vector(rng, 2);
    const auto x  = lstsq(a, a * x0);
    CHECK((x - x0).norm() <= 1e-12 * x0.norm());
}

TEST_CASE("lstsq gives the minimum-norm solution of a rank-one system")
{
    // A = u v^*: pinv(A) = A^* / ||A||_F^2.
    ComplexVector u(2), v(2), b(2);
    u << 1.0, Complex(0, 1);
    v << 2.0, Complex(1, -1);
    b << Complex(1, 1), 3.0;
    const ComplexMatrix a     = u * v.adjoint();
    const ComplexVector oracle = a.adjoint() * b / a.squaredNorm();
    const auto x               = lstsq(a, b);
    CHECK((x - oracle).norm() <= 1e-13 * oracle.norm());
}

TEST_CASE("lstsq shape and rcond checks")
{
    CHECK_THROWS_AS(lstsq(ComplexMatrix::Identity(3, 3), ComplexVector::Ones(2)), Error);
    try
    {
        lstsq(ComplexMatrix::Identity(3, 3), ComplexVector::Ones(2));
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::ShapeMismatch);
    }
    CHECK_THROWS_AS(lstsq(ComplexMatrix::Identity(2, 2), ComplexVector::Ones(2), 0.0), Error);
    CHECK_THROWS_AS(lstsq(ComplexMatrix::Identity(2, 2), ComplexVector::Ones(2), 1.0), Error);
}

TEST_CASE("lstsq residual cannot be improved by small perturbations")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial)
    {
        const auto a    = random_matrix(rng, 12, 5);
        const auto b    = random_vector(rng, 12);
        const auto x    = lstsq(a, b);
        const double r0 = (a * x - b).norm();
        for (int k = 0; k < 100; ++k)
        {
            ComplexVector dir = random_vector(rng, 5);
            dir.normalize();
            const double r = (a * (x + 1e-6 * dir) - b).norm();
            CHECK(r >= r0 - 1e-14);
        }
    }
}

TEST_CASE("lstsq drops singular values below the cutoff")
{
    ComplexMatrix a = ComplexMatrix::Zero(3, 2);
    a(0, 0)         = 1.0;
    a(1, 1)         = 1e-15;
    const LeastSquares ls(a, 1e-13);
    CHECK(ls.rank() == 1);
    ComplexVector b(3);
    b << 2.0, 1.0, 0.0;
    const auto x = ls.solve(b);
    CHECK(std::abs(x(0) - 2.0) < 1e-15);
    CHECK(x(1) == Complex(0.0));
}

TEST_CASE("gen_eig with B = I is the standard eigenproblem")
{
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0)         = 1.0;
    a(1, 1)         = 2.0;
    const auto ev   = sorted(finite_eigenvalues(a, ComplexMatrix::Identity(2, 2)));
    REQUIRE(ev.size() == 2);
    CHECK(std::abs(ev[0] - 1.0) < 1e-14);
    CHECK(std::abs(ev[1] - 2.0) < 1e-14);
}

TEST_CASE("gen_eig on the two-point arrowhead pencil")
{
    // Support {0, 1}, weights {1, 1}: one finite eigenvalue 1/2, two infinite.
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    ComplexMatrix b = ComplexMatrix::Identity(3, 3);
    a(0, 1) = a(0, 2) = 1.0;
    a(1, 0) = a(2, 0) = 1.0;
    a(1, 1)           = 0.0;
    a(2, 2)           = 1.0;
    b(0, 0)           = 0.0;
    const auto all    = gen_eig(a, b);
    REQUIRE(all.size() == 3);
    const auto infinite = std::count_if(all.begin(), all.end(), [](const auto& e) { return e.infinite; });
    CHECK(infinite == 2);
    const auto fin = finite_eigenvalues(a, b);
    REQUIRE(fin.size() == 1);
    CHECK(std::abs(fin[0] - 0.5) < 1e-14);
}

TEST_CASE("gen_eig matches the eigenvalues of inv(B) A")
{
    std::mt19937_64 rng(5);
    const auto a = random_matrix(rng, 5, 5);
    const auto b = random_matrix(rng, 5, 5);
    Eigen::ComplexEigenSolver<ComplexMatrix> oracle(b.partialPivLu().solve(a));
    const auto got = finite_eigenvalues(a, b);
    REQUIRE(got.size() == 5);
    CHECK(nearest_gap(got, {oracle.eigenvalues().data(), oracle.eigenvalues().data() + 5}) <= 1e-10);
}

TEST_CASE("gen_eig with B = I agrees with a standard solver on random 8 x 8 input")
{
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial)
    {
        const auto a = random_matrix(rng, 8, 8);
        Eigen::ComplexEigenSolver<ComplexMatrix> oracle(a);
        const auto got = finite_eigenvalues(a, ComplexMatrix::Identity(8, 8));
        REQUIRE(got.size() == 8);
        CHECK(nearest_gap(got, {oracle.eigenvalues().data(), oracle.eigenvalues().data() + 8}) <= 1e-10);
    }
}

TEST_CASE("gen_eig shape checks")
{
    CHECK_THROWS_AS(gen_eig(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)), Error);
    CHECK_THROWS_AS(gen_eig(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), Error);
}
