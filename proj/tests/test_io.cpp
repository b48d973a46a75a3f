#include <doctest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <random>

#include <unistd.h>

#include <expanal/error.hpp>
#include <expanal/io.hpp>
#include <expanal/recursive.hpp>
#include <expanal/signals.hpp>

#include "support.hpp"

using namespace expanal;
using io::Json;

namespace
{

std::filesystem::path scratch_dir()
{
    auto dir = std::filesystem::temp_directory_path() / ("expanal_io_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
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

} // namespace

TEST_CASE("complex numbers are two-element arrays")
{
    const Complex z(0.1, -1.0 / 3.0);
    const Json j = io::complex_to_json(z);
    CHECK(j.is_array());
    CHECK(j.size() == 2);
    CHECK(io::complex_from_json(j) == z);
    CHECK(io::complex_from_json(Json::parse("[2, 0]")) == Complex(2.0, 0.0));
    CHECK(code_of([] { io::complex_from_json(Json::parse("[1]")); }) == ErrorCode::ParseError);
    CHECK(code_of([] { io::complex_from_json(Json::parse("\"1+2i\"")); }) == ErrorCode::ParseError);
}

TEST_CASE("exponential sums roundtrip bit-exactly through text")
{
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial)
    {
        const auto s    = support::random_distinct_instance(rng, 1 + trial % 4, 1 + trial % 5, 3, 1.3);
        const auto text = io::sum_to_json(s, 1.3).dump();
        const Json back = Json::parse(text);
        const auto t    = io::sum_from_json(back);
        CHECK(t.frequencies() == s.frequencies());
        CHECK(t.coefficients() == s.coefficients());
        CHECK(io::period_from_json(back) == 1.3);
    }
    CHECK_FALSE(io::period_from_json(io::sum_to_json(signals::f1())).has_value());
}

TEST_CASE("exponential sum parse errors")
{
    CHECK(code_of([] { io::sum_from_json(Json::parse(R"({"d": 1, "gamma": [[1, 0]]})")); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] {
              io::sum_from_json(Json::parse(R"({"d": 2, "gamma": [[1, 0]], "lambda": [[[0, 1]]]})"));
          }) == ErrorCode::ParseError);
}

TEST_CASE("coefficient grids roundtrip with their truth")
{
    const auto f1  = signals::f1();
    const auto src = synthesize(f1, 4.0, 15, SparseLines{7});
    const auto g   = io::grid_from_json(Json::parse(io::grid_to_json(src, &f1).dump()));
    CHECK(g.source.dimension() == 2);
    CHECK(g.source.period() == 4.0);
    CHECK(g.source.half_width() == 15);
    CHECK(coverage_to_string(g.source.coverage()) == "sparse:7");
    CHECK(g.source.entries() == src.entries());
    REQUIRE(g.truth.has_value());
    CHECK(g.truth->frequencies() == f1.frequencies());

    const auto full = synthesize(signals::f4(), 1.0, 3, FullGrid{});
    const auto h    = io::grid_from_json(io::grid_to_json(full));
    CHECK(h.source.grid_values() == full.grid_values());
    CHECK_FALSE(h.truth.has_value());
}

TEST_CASE("coefficient grid parse errors")
{
    CHECK(code_of([] {
              io::grid_from_json(Json::parse(R"({"d": 1, "P": -1, "N": 2, "coverage": "full", "entries": []})"));
          }) == ErrorCode::ParseError);
    CHECK(code_of([] {
              io::grid_from_json(Json::parse(
                  R"({"d": 2, "P": 1, "N": 2, "coverage": "full", "entries": [{"k": [0], "c": [1, 0]}]})"));
          }) == ErrorCode::ParseError);
    CHECK(code_of([] {
              io::grid_from_json(Json::parse(R"({"d": 1, "P": 1, "N": 2, "coverage": "lines", "entries": []})"));
          }) == ErrorCode::ParseError);
}

TEST_CASE("pole tree json mirrors the tree")
{
    const auto rec = recover_recursive(synthesize(signals::f4(), 1.0, 10, FullGrid{}));
    const Json j   = io::tree_to_json(rec.tree, 1.0);
    CHECK(j.at("d") == 3);
    CHECK(j.at("leaves") == 4);
    CHECK(j.at("level_sizes") == Json::parse("[2, 3, 4]"));
    REQUIRE(j.at("roots").size() == 2);
    std::size_t leaves = 0;
    std::function<void(const Json&)> walk = [&](const Json& node) {
        CHECK(node.at("pole").size() == 2);
        if (node.at("children").empty())
        {
            CHECK(node.at("depth") == 3);
            CHECK(node.at("multiplicity") == 1);
            ++leaves;
        }
        for (const auto& c : node.at("children"))
        {
            walk(c);
        }
    };
    for (const auto& r : j.at("roots"))
    {
        walk(r);
    }
    CHECK(leaves == 4);
}

TEST_CASE("read_json and write_atomic")
{
    const auto dir  = scratch_dir();
    const auto path = (dir / "a.json").string();
    io::write_atomic(path, R"({"x": [1, 2]})");
    CHECK(io::read_json(path).at("x").size() == 2);
    io::write_atomic(path, "{}");
    CHECK(io::read_json(path).empty());
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir))
    {
        ++files;
    }
    CHECK(files == 1);

    {
        std::ofstream(dir / "bad.json") << "{ not json";
    }
    CHECK(code_of([&] { io::read_json((dir / "bad.json").string()); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { io::read_json((dir / "missing.json").string()); }) == ErrorCode::ParseError);
    std::filesystem::remove_all(dir);
}
