#ifndef EXPANAL_TESTS_SUPPORT_HPP
#define EXPANAL_TESTS_SUPPORT_HPP

// Shared generators and independent oracles for the test binaries.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <expanal/expsum.hpp>

namespace support
{

using expanal::Complex;
using expanal::ComplexMatrix;
using expanal::ComplexVector;
using expanal::ExponentialSum;

inline constexpr Complex I{0.0, 1.0};

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0)
{
    return {uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

/// Coefficient with modulus in [0.5, 2] and a random phase.
inline Complex random_gamma(std::mt19937_64& rng)
{
    return std::polar(uniform(rng, 0.5, 2.0), uniform(rng, -std::numbers::pi, std::numbers::pi));
}

inline double distance_to_integer(double x) { return std::abs(x - std::round(x)); }

/// Poles u + iv with u in (-umax, umax), |v| <= vmax, at least `sep` apart
/// and with u at least 0.15 away from every integer.
inline std::vector<Complex> random_poles(std::mt19937_64& rng, int M, double umax, double vmax,
                                         double sep)
{
    std::vector<Complex> poles;
    while (static_cast<int>(poles.size()) < M)
    {
        const Complex b{uniform(rng, -umax, umax), uniform(rng, -vmax, vmax)};
        if (distance_to_integer(b.real()) < 0.15)
        {
            continue;
        }
        if (std::all_of(poles.begin(), poles.end(), [&](Complex q) { return std::abs(q - b) >= sep; }))
        {
            poles.push_back(b);
        }
    }
    return poles;
}

/// Exponential sum whose axis-l poles (b = lambda P / 2 pi i) are the columns
/// of `poles` (M x d).
inline ExponentialSum sum_from_poles(const std::vector<std::vector<Complex>>& poles,
                                     const std::vector<Complex>& gamma, double period)
{
    const auto M = static_cast<Eigen::Index>(gamma.size());
    const auto d = static_cast<Eigen::Index>(poles.front().size());
    ComplexMatrix lambda(M, d);
    ComplexVector g(M);
    for (Eigen::Index j = 0; j < M; ++j)
    {
        for (Eigen::Index l = 0; l < d; ++l)
        {
            lambda(j, l) = expanal::two_pi_i * poles[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] / period;
        }
        g(j) = gamma[static_cast<std::size_t>(j)];
    }
    return ExponentialSum(lambda, g);
}

/// Random d-variate instance whose poles are pairwise distinct along every
/// axis, with |Re b| < tau - 0.5 so that tau is a valid diagonal shift.
inline ExponentialSum random_distinct_instance(std::mt19937_64& rng, int d, int M, int tau, double period,
                                               double vmax = 0.4, double sep = 0.35)
{
    std::vector<std::vector<Complex>> rows(static_cast<std::size_t>(M), std::vector<Complex>(static_cast<std::size_t>(d)));
    for (int l = 0; l < d; ++l)
    {
        const auto axis = random_poles(rng, M, tau - 0.5, vmax, sep);
        for (int j = 0; j < M; ++j)
        {
            rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] = axis[static_cast<std::size_t>(j)];
        }
    }
    std::vector<Complex> gamma;
    for (int j = 0; j < M; ++j)
    {
        gamma.push_back(random_gamma(rng));
    }
    return sum_from_poles(rows, gamma, period);
}

//
// Adaptive Gauss-Kronrod quadrature of
//   c_k = P^{-d} int_{[0,P]^d} f(t) exp(-2 pi i <k, t> / P) dt
// for d <= 2, integrating real and imaginary parts separately.
//
inline Complex quadrature_coefficient(const ExponentialSum& sum, const std::vector<int>& k, double period)
{
    using boost::math::quadrature::gauss_kronrod;
    const int d = sum.dimension();
    auto integrand = [&](double t1, double t2) {
        const double t[2] = {t1, t2};
        const Complex f   = sum(std::span<const double>(t, static_cast<std::size_t>(d)));
        double phase      = 0.0;
        for (int l = 0; l < d; ++l)
        {
            phase += k[static_cast<std::size_t>(l)] * t[l];
        }
        return f * std::exp(Complex(0.0, -2.0 * std::numbers::pi * phase / period));
    };

    constexpr unsigned depth = 15;
    constexpr double tol     = 1e-13;
    auto part = [&](bool imag) {
        if (d == 1)
        {
            return gauss_kronrod<double, 31>::integrate(
                [&](double t) { const Complex v = integrand(t, 0.0); return imag ? v.imag() : v.real(); },
                0.0, period, depth, tol);
        }
        return gauss_kronrod<double, 31>::integrate(
            [&](double t1) {
                return gauss_kronrod<double, 31>::integrate(
                    [&](double t2) { const Complex v = integrand(t1, t2); return imag ? v.imag() : v.real(); },
                    0.0, period, depth, tol);
            },
            0.0, period, depth, tol);
    };
    return Complex(part(false), part(true)) / std::pow(period, d);
}

/// Any d: each term is separable, so c_k is a sum of products of 1-D
/// quadratures of exp(lambda t) exp(-2 pi i k t / P) over [0, P].
inline Complex separable_quadrature_coefficient(const ExponentialSum& sum, const std::vector<int>& k,
                                                double period)
{
    using boost::math::quadrature::gauss_kronrod;
    auto one = [&](Complex lambda, int kk) {
        auto part = [&](bool imag) {
            return gauss_kronrod<double, 31>::integrate(
                [&](double t) {
                    const Complex v = std::exp(lambda * t - Complex(0.0, 2.0 * std::numbers::pi * kk * t / period));
                    return imag ? v.imag() : v.real();
                },
                0.0, period, 15, 1e-13);
        };
        return Complex(part(false), part(true)) / period;
    };
    Complex total{};
    for (int j = 0; j < sum.order(); ++j)
    {
        Complex term = sum.coefficients()(j);
        for (int l = 0; l < sum.dimension(); ++l)
        {
            term *= one(sum.frequencies()(j, l), k[static_cast<std::size_t>(l)]);
        }
        total += term;
    }
    return total;
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

} // namespace support

#endif
