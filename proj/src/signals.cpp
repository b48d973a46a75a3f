#include <expanal/error.hpp>
#include <expanal/signals.hpp>

#include <cmath>
#include <numbers>

namespace expanal::signals
{

namespace
{

constexpr Complex I{0.0, 1.0};

ExponentialSum make(std::initializer_list<std::initializer_list<Complex>> rows,
                    std::initializer_list<Complex> gamma)
{
    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(rows.begin()->size());
    ComplexMatrix lambda(m, d);
    Eigen::Index j = 0;
    for (const auto& row : rows)
    {
        Eigen::Index l = 0;
        for (const auto& v : row)
        {
            lambda(j, l++) = v;
        }
        ++j;
    }
    ComplexVector g(static_cast<Eigen::Index>(gamma.size()));
    j = 0;
    for (const auto& v : gamma)
    {
        g(j++) = v;
    }
    return ExponentialSum(std::move(lambda), std::move(g));
}

const Complex gamma_pt[] = {{1, 1}, {2, 3}, {5, -6}, {0.2, -1}, {1, 1}, {2, 3}, {5, -6}, {0.2, -1}};

} // namespace

ExponentialSum f1()
{
    return make({{std::sqrt(2.21) * I, 3.33 * I},
                 {-5.63 * I, -std::sqrt(5.0) * I},
                 {-3.47 * I, std::sqrt(6.0) * I},
                 {-std::sqrt(7.1) * I, -4.5 * I},
                 {0.46 * I, -9.44 * I}},
                {3, 2, 1, 2, 1});
}

ExponentialSum f2()
{
    const double sp = std::sqrt(std::numbers::pi);
    const double s20 = std::sqrt(20.0);
    return make({{-2.0 - 3.0 * I, sp * (-1.0 + I), 0.5 * I},
                 {-1.0 + s20 * I, -3.0 + I, -1.0 + I},
                 {3.0 * I, -4.0 + 0.5 * I, 1.22 * I},
                 {-2.0 + 3.0 * I, sp * (-1.0 - I), -0.5 * I},
                 {-1.0 - s20 * I, -3.0 - I, -1.0 - I},
                 {-3.0 * I, -4.0 - 0.5 * I, -1.22 * I}},
                {-1, -2, -3, 1, 2, 3});
}

ExponentialSum f3()
{
    const double pi = std::numbers::pi;
    const Complex r1 = 2.0 + 2.0 * I;
    const Complex r2 = 3.0 + I;
    return make({{r1, 0.2 * I, I, 1.0},
                 {r1, 0.2 * I, I, -1.0},
                 {r1, -2.0, 1.0 + I, I},
                 {r1, -2.0, 1.0 + I, -2.0 * I},
                 {r1, -2.0, 1.0 + I, 3.0 * I},
                 {r2, -pi, -3.0, -std::sqrt(pi) * I},
                 {r2, -pi, 1.0, 2.0 * I},
                 {r2, -pi, 1.0, -4.0},
                 {r2, 0.2 * I, 1.0 + I, std::sqrt(20.0) * I}},
                {1, 1, 1, 1, 1, 1, 1, 1, 1});
}

ExponentialSum f4()
{
    return make({{-1.47 - 0.27 * I, -1.87 - 0.57 * I, -1.35 + 4.61 * I},
                 {-1.47 - 0.27 * I, -1.87 - 0.57 * I, -1.26 - 2.58 * I},
                 {-1.47 - 0.27 * I, -0.84 + 7.53 * I, -1.75 - 1.33 * I},
                 {-0.60 + 4.86 * I, -0.13 + 5.05 * I, -0.12 + 8.34 * I}},
                {1, -4, -2, 2});
}

ExponentialSum f5()
{
    return make({{0.1 * I, 1.2 * I},
                 {0.19 * I, 1.3 * I},
                 {0.3 * I, 1.5 * I},
                 {0.35 * I, 0.3 * I},
                 {-0.1 * I, 1.2 * I},
                 {-0.19 * I, 0.35 * I},
                 {-0.3 * I, -1.5 * I},
                 {-0.3 * I, 0.3 * I}},
                {gamma_pt[0], gamma_pt[1], gamma_pt[2], gamma_pt[3], gamma_pt[4], gamma_pt[5],
                 gamma_pt[6], gamma_pt[7]});
}

ExponentialSum f6()
{
    return make({{0.1 * I, 1.2 * I, 0.1 * I},
                 {0.19 * I, 1.3 * I, 0.2 * I},
                 {0.4 * I, 1.5 * I, 1.5 * I},
                 {0.45 * I, 0.3 * I, -0.3 * I},
                 {-0.1 * I, 1.2 * I, 0.1 * I},
                 {-0.19 * I, 0.35 * I, -0.5 * I},
                 {-0.4 * I, -1.5 * I, 0.25 * I},
                 {-0.4 * I, 0.3 * I, -0.3 * I}},
                {gamma_pt[0], gamma_pt[1], gamma_pt[2], gamma_pt[3], gamma_pt[4], gamma_pt[5],
                 gamma_pt[6], gamma_pt[7]});
}

ExponentialSum f7()
{
    return make({{0.1 * I, 1.2 * I, 0.1 * I, 0.45 * I},
                 {0.19 * I, 1.3 * I, 0.2 * I, 1.5 * I},
                 {0.3 * I, 1.5 * I, 1.5 * I, -1.3 * I},
                 {0.45 * I, 0.3 * I, -0.3 * I, 0.4 * I},
                 {-0.1 * I, 1.2 * I, 0.1 * I, -1.5 * I},
                 {-0.19 * I, 0.35 * I, -0.5 * I, -0.45 * I},
                 {-0.4 * I, -1.5 * I, 0.25 * I, 1.3 * I},
                 {-0.4 * I, 0.3 * I, -0.3 * I, 0.4 * I}},
                {gamma_pt[0], gamma_pt[1], gamma_pt[2], gamma_pt[3], gamma_pt[4], gamma_pt[5],
                 gamma_pt[6], gamma_pt[7]});
}

std::vector<Reference> all()
{
    return {
        {"f1", f1(), 4.0, 15, 7},  {"f2", f2(), 5.0, 15, 4},  {"f3", f3(), 2.4, 10, 0},
        {"f4", f4(), 1.0, 10, 0},  {"f5", f5(), 60.0, 15, 0}, {"f6", f6(), 60.0, 15, 0},
        {"f7", f7(), 60.0, 15, 0},
    };
}

Reference by_name(const std::string& name)
{
    for (auto& r : all())
    {
        if (r.name == name)
        {
            return r;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown reference signal '" + name + "'");
}

} // namespace expanal::signals
