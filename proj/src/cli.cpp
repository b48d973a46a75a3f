#include <expanal/cli.hpp>
#include <expanal/error.hpp>
#include <expanal/io.hpp>
#include <expanal/recursive.hpp>
#include <expanal/signals.hpp>
#include <expanal/sparse_grid.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

namespace expanal::cli
{

namespace
{

using io::Json;

struct GenerateArgs
{
    std::string signal;
    std::string reference;
    double period = 0.0;
    int N         = 0;
    std::string coverage = "full";
    std::string out;
    bool no_truth = false;
};

struct RecoverArgs
{
    std::string grid;
    std::string method;
    double tol = 1e-12;
    int tau    = 0;
    bool pencil = false;
    std::string truth;
    bool timing = false;
    std::string out;
};

struct CompareArgs
{
    std::string truth;
    std::string result;
    std::string json;
};

struct PlotArgs
{
    int d   = 2;
    int N   = 0;
    int tau = 0;
    std::string out;
};

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
}

int input_failure(std::ostream& err, const std::exception& e)
{
    err << "error: " << e.what() << '\n';
    return exit_input_error;
}

// Truth may be a plain signal file or a grid file carrying "truth".
ExponentialSum truth_from(const Json& j)
{
    return j.is_object() && j.contains("truth") ? io::sum_from_json(j.at("truth")) : io::sum_from_json(j);
}

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err)
{
    std::optional<ExponentialSum> sum;
    double period = a.period;
    int N         = a.N;
    try
    {
        if (!a.reference.empty())
        {
            auto ref = signals::by_name(a.reference);
            sum      = ref.sum;
            period   = period > 0.0 ? period : ref.period;
            N        = N > 0 ? N : ref.half_width;
        }
        else
        {
            const Json j = io::read_json(a.signal);
            sum          = io::sum_from_json(j);
            if (!(period > 0.0))
            {
                period = io::period_from_json(j).value_or(0.0);
            }
        }
        if (!(period > 0.0))
        {
            throw Error(ErrorCode::InvalidArgument, "no period: pass --period or put \"P\" in the signal");
        }
        if (N < 1)
        {
            throw Error(ErrorCode::InvalidArgument, "--N must be >= 1");
        }
        const Coverage coverage = parse_coverage(a.coverage);
        if (const auto* s = std::get_if<SparseLines>(&coverage))
        {
            plan(sum->dimension(), N, s->tau);
        }

        const auto source = synthesize(*sum, period, N, coverage);
        const Json j      = io::grid_to_json(source, a.no_truth ? nullptr : &*sum);
        io::write_atomic(a.out, j.dump() + "\n");
        out << "wrote " << source.size() << " coefficients (" << coverage_to_string(coverage) << ", d = "
            << source.dimension() << ", N = " << N << ") to " << a.out << '\n';
        return exit_ok;
    }
    catch (const Error& e)
    {
        if (e.code() == ErrorCode::DegenerateFrequency)
        {
            err << "error: " << e.what() << '\n';
            return exit_degenerate;
        }
        return input_failure(err, e);
    }
}

Json failure_payload(const std::string& method, const Error& e)
{
    return Json{{"status", "failed"}, {"method", method}, {"error", std::string(e.name())}, {"message", e.what()}};
}

int cmd_recover(const RecoverArgs& a, std::uint64_t seed, std::ostream& out, std::ostream& err)
{
    std::optional<io::GridFile> grid;
    std::optional<ExponentialSum> truth;
    try
    {
        grid = io::grid_from_json(io::read_json(a.grid));
        if (!a.truth.empty())
        {
            truth = truth_from(io::read_json(a.truth));
        }
        else if (grid->truth)
        {
            truth = grid->truth;
        }
        if (truth && truth->dimension() != grid->source.dimension())
        {
            throw Error(ErrorCode::ShapeMismatch, "truth and grid dimensions differ");
        }
        if (!(a.tol > 0.0))
        {
            throw Error(ErrorCode::InvalidArgument, "--tol must be positive");
        }
    }
    catch (const std::exception& e)
    {
        return input_failure(err, e);
    }

    const auto& source = grid->source;
    const auto* lines  = std::get_if<SparseLines>(&source.coverage());
    if ((a.method == "sparse" && lines == nullptr) || (a.method == "recursive" && lines != nullptr))
    {
        err << "error: method '" << a.method << "' cannot run on coverage "
            << coverage_to_string(source.coverage()) << '\n';
        return exit_method_mismatch;
    }
    if (lines != nullptr && a.tau != 0 && a.tau != lines->tau)
    {
        err << "error: --tau " << a.tau << " does not match the grid's " << coverage_to_string(source.coverage())
            << '\n';
        return exit_method_mismatch;
    }

    RationalOptions rational;
    rational.tol    = a.tol;
    rational.method = a.pencil ? PoleMethod::LoewnerPencil : PoleMethod::Eigenproblem;

    const auto start = std::chrono::steady_clock::now();
    Json result{{"status", "ok"}, {"method", a.method}};
    std::optional<ExponentialSum> recovered;
    try
    {
        Json diagnostics;
        Json traces = Json::array();
        if (a.method == "sparse")
        {
            SparseConfig config;
            config.tau      = a.tau;
            config.rational = rational;
            auto rec        = recover_sparse(source, config);
            for (const auto& ax : rec.axes)
            {
                traces.push_back(io::trace_to_json(ax.trace));
            }
            diagnostics["aaa"]     = std::move(traces);
            diagnostics["pairing"] = io::certificate_to_json(rec.certificate);
            diagnostics["samples_per_line_total"] = plan(source.dimension(), source.half_width(), lines->tau).total_count();
            recovered = std::move(rec.sum);
        }
        else
        {
            RecursiveConfig config;
            config.rational = rational;
            config.seed     = seed;
            auto rec        = recover_recursive(source, config);
            for (const auto& t : rec.traces)
            {
                traces.push_back(io::trace_to_json(t));
            }
            diagnostics["aaa"]                   = std::move(traces);
            diagnostics["tree"]                  = io::tree_to_json(rec.tree, source.period());
            diagnostics["resynthesis_residual"]  = rec.resynthesis_residual;
            diagnostics["hidden_pole_suspected"] = rec.hidden_pole_suspected;
            if (rec.hidden_pole_suspected)
            {
                err << "warning: re-synthesis residual " << sci(rec.resynthesis_residual)
                    << " suggests a pole hidden from the axis-line fits\n";
            }
            recovered = std::move(rec.sum);
        }
        result["d"]           = source.dimension();
        result["P"]           = source.period();
        result["N"]           = source.half_width();
        result["M"]           = recovered->order();
        result["recovered"]   = io::sum_to_json(*recovered, source.period());
        result["diagnostics"] = std::move(diagnostics);
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        try
        {
            io::write_atomic(a.out, failure_payload(a.method, e).dump(2) + "\n");
        }
        catch (const std::exception& w)
        {
            err << "error: " << w.what() << '\n';
        }
        return exit_recovery_failure;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    out << "recovered M = " << recovered->order() << " (" << a.method << ")\n";
    if (truth)
    {
        ErrorOptions eo;
        eo.seed            = seed;
        const auto report  = relative_errors(*truth, *recovered, eo);
        result["errors"]   = io::errors_to_json(report);
        out << "e(Lambda) = " << sci(report.e_lambda) << "  e(gamma) = " << sci(report.e_gamma)
            << "  e(f) = " << sci(report.e_f) << '\n';
    }
    if (a.timing)
    {
        result["wall_time"] = wall;
    }
    try
    {
        io::write_atomic(a.out, result.dump(2) + "\n");
    }
    catch (const std::exception& e)
    {
        return input_failure(err, e);
    }
    return exit_ok;
}

int cmd_compare(const CompareArgs& a, std::uint64_t seed, std::ostream& out, std::ostream& err)
{
    try
    {
        const auto truth    = truth_from(io::read_json(a.truth));
        const Json r        = io::read_json(a.result);
        if (r.is_object() && r.contains("status") && r.at("status") != "ok")
        {
            throw Error(ErrorCode::ParseError, "result file records a failed recovery");
        }
        const auto recon = r.is_object() && r.contains("recovered") ? io::sum_from_json(r.at("recovered"))
                                                                    : io::sum_from_json(r);
        if (truth.dimension() != recon.dimension())
        {
            throw Error(ErrorCode::ShapeMismatch, "truth and result dimensions differ");
        }
        ErrorOptions eo;
        eo.seed           = seed;
        const auto report = relative_errors(truth, recon, eo);

        out << "e(Lambda)    e(gamma)     e(f)\n"
            << sci(report.e_lambda) << "   " << sci(report.e_gamma) << "   " << sci(report.e_f) << '\n';
        if (report.order_mismatch)
        {
            out << "order mismatch: truth M = " << truth.order() << ", recovered M = " << recon.order() << '\n';
        }
        if (!a.json.empty())
        {
            io::write_atomic(a.json, io::errors_to_json(report).dump(2) + "\n");
        }
        return exit_ok;
    }
    catch (const std::exception& e)
    {
        return input_failure(err, e);
    }
}

int cmd_plot_grid(const PlotArgs& a, std::ostream& out, std::ostream& err)
{
    try
    {
        const auto p = plan(a.d, a.N, a.tau);
        std::ostringstream csv;
        csv << "line,category";
        for (int l = 1; l <= a.d; ++l)
        {
            csv << ",k" << l;
        }
        csv << '\n';
        int id = 0;
        for (const auto* group : {&p.axis_lines, &p.diagonal_lines})
        {
            for (const auto& line : *group)
            {
                ++id;
                const char* cat = line.kind == IndexLine::Kind::Axis ? "axis" : "diagonal";
                for (const auto& k : line.indices)
                {
                    csv << id << ',' << cat;
                    for (int v : k)
                    {
                        csv << ',' << v;
                    }
                    csv << '\n';
                }
            }
        }
        if (a.out.empty())
        {
            out << csv.str();
        }
        else
        {
            io::write_atomic(a.out, csv.str());
        }
        return exit_ok;
    }
    catch (const std::exception& e)
    {
        return input_failure(err, e);
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Recover multivariate exponential sums from Fourier coefficients", "expanal"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Seed for randomized checks and e(f) subsampling")->capture_default_str();

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Synthesize a coefficient grid from a signal");
    auto* sig = g->add_option("--signal", gen.signal, "Signal JSON file")->check(CLI::ExistingFile);
    auto* ref = g->add_option("--reference", gen.reference, "Built-in reference signal (f1 .. f7)");
    sig->excludes(ref);
    g->add_option("--period,-P", gen.period, "Period P (defaults to the signal's \"P\")");
    g->add_option("--N,-N", gen.N, "Half-width of the index box");
    g->add_option("--coverage", gen.coverage, "full or sparse:<tau>")->capture_default_str();
    g->add_option("--out,-o", gen.out, "Output grid file")->required();
    g->add_flag("--no-truth", gen.no_truth, "Do not embed the signal in the grid file");

    RecoverArgs rec;
    auto* r = app.add_subcommand("recover", "Recover an exponential sum from a coefficient grid");
    r->add_option("--grid", rec.grid, "Coefficient grid file")->required();
    r->add_option("--method", rec.method, "sparse or recursive")
        ->required()
        ->check(CLI::IsMember({"sparse", "recursive"}));
    r->add_option("--tol", rec.tol, "Relative AAA tolerance")->capture_default_str();
    r->add_option("--tau", rec.tau, "Diagonal shift (sparse method; defaults to the grid's)");
    r->add_flag("--pencil", rec.pencil, "Extract poles from the Loewner pencil");
    r->add_option("--truth", rec.truth, "Ground-truth signal (overrides the one stored in the grid)");
    r->add_flag("--timing", rec.timing, "Record wall time in the result");
    r->add_option("--out,-o", rec.out, "Output result file")->required();

    CompareArgs cmp;
    auto* c = app.add_subcommand("compare", "Relative errors of a result against the ground truth");
    c->add_option("--truth", cmp.truth, "Signal or grid file holding the truth")->required();
    c->add_option("--result", cmp.result, "Result or signal file")->required();
    c->add_option("--json", cmp.json, "Also write the report as JSON");

    PlotArgs pl;
    auto* p = app.add_subcommand("plot-grid", "CSV of the sparse index lines");
    p->add_option("--d,-d", pl.d, "Dimension")->capture_default_str();
    p->add_option("--N,-N", pl.N, "Half-width")->required();
    p->add_option("--tau", pl.tau, "Diagonal shift")->required();
    p->add_option("--out,-o", pl.out, "Output CSV (stdout when omitted)");

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input_error;
    }

    if (g->parsed())
    {
        if (gen.signal.empty() && gen.reference.empty())
        {
            err << "error: generate needs --signal or --reference\n";
            return exit_input_error;
        }
        return cmd_generate(gen, out, err);
    }
    if (r->parsed())
    {
        return cmd_recover(rec, seed, out, err);
    }
    if (c->parsed())
    {
        return cmd_compare(cmp, seed, out, err);
    }
    return cmd_plot_grid(pl, out, err);
}

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace expanal::cli
