// openbook: ground states and width sweeps on open books and metric graphs.

#include "openbook/spec_io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <vector>

int main(int argc, char** argv)
{
    using namespace openbook;

    CLI::App app{"Nonlinear Schroedinger ground states on open books"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");

    RunConfig config;
    std::string widths;
    std::string bracket;
    std::string window;
    double width = 0.0;
    double truncate = 0.0;
    std::vector<CLI::Option*> width_opts;
    std::vector<CLI::Option*> truncate_opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", config.input, "Book or graph specification (JSON)")->required();
        sub->add_option("--omega", config.omega, "Frequency omega > 0");
        sub->add_option("--p", config.p, "Nonlinearity exponent p > 1");
        sub->add_option("--h", config.h, "Mesh size");
        sub->add_option("--tol", config.tol, "Solver tolerance");
        truncate_opts.push_back(sub->add_option("--truncate", truncate, "Truncation length for infinite sides"));
        sub->add_option("--seed", config.seed, "Seed for random initial guesses");
        sub->add_option("--max-iter", config.max_iter, "Iteration cap per start");
        sub->add_option("--out", config.out, "Output file (default: stdout)");
    };

    const std::map<std::string, Command> commands{
        {"spectrum", Command::Spectrum}, {"solve", Command::Solve}, {"sweep", Command::Sweep},
        {"lmin", Command::Lmin},         {"decay", Command::Decay}, {"report", Command::Report}};
    std::map<std::string, CLI::App*> subs;
    subs["spectrum"] = app.add_subcommand("spectrum", "Smallest eigenvalues of the Kirchhoff Laplacian");
    subs["solve"] = app.add_subcommand("solve", "Single ground state, report and field dump");
    subs["sweep"] = app.add_subcommand("sweep", "Level curve over transverse widths (CSV)");
    subs["lmin"] = app.add_subcommand("lmin", "Bisection for the critical width");
    subs["decay"] = app.add_subcommand("decay", "Tail decay fits on truncated pages");
    subs["report"] = app.add_subcommand("report", "Existence condition against the strip level");
    for (auto& [name, sub] : subs) add_common(sub);
    subs["spectrum"]->add_option("--k", config.k, "Number of eigenpairs");
    width_opts.push_back(subs["solve"]->add_option("--L", width, "Transverse width (graph inputs)"));
    width_opts.push_back(subs["sweep"]->add_option("--L", width, "Single transverse width"));
    subs["sweep"]->add_option("--widths", widths, "Widths a:b:n");
    subs["lmin"]->add_option("--bracket", bracket, "Bracket lo,hi")->required();
    subs["decay"]->add_option("--window", window, "Fit window x0,x1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        for (const auto& [name, sub] : subs) {
            if (sub->parsed()) config.command = commands.at(name);
        }
        const auto given = [](const std::vector<CLI::Option*>& opts) {
            for (const auto* o : opts) {
                if (o->count() > 0) return true;
            }
            return false;
        };
        if (given(width_opts)) config.width = width;
        if (given(truncate_opts)) config.truncate = truncate;
        if (!widths.empty()) config.widths = parse_width_list(widths);
        if (!bracket.empty()) config.bracket = parse_pair(bracket);
        if (!window.empty()) config.window = parse_pair(window);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return run(config, std::cout, std::cerr);
}
