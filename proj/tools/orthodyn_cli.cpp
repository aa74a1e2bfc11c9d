#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "orthodyn/cli.hpp"

using namespace orthodyn;

int main(int argc, char** argv) {
    CLI::App app{"orthodyn: reduced ladder dynamics from orthogonal polynomial data"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv", floats = "fixed17";
    cli::Options opt;
    double tol = 0.0;
    bool gnuplot = false;
    app.add_option("--config", config_path, "scenario config (INI)")->required();
    app.add_option("--out", out_path, "output file (stdout if omitted)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--float", floats, "fixed17 or shortest")->check(CLI::IsMember({"fixed17", "shortest"}));
    app.add_flag("--oracle", opt.oracle, "append truncated-matrix oracle columns");
    app.add_option("--truncation", opt.truncation, "oracle truncation size")->check(CLI::PositiveNumber);
    auto* tol_opt = app.add_option("--tol", tol, "override every tolerance in the config")->check(CLI::PositiveNumber);
    app.add_flag("--gnuplot", gnuplot, "write <out>.gp next to the CSV");

    for (const char* name : {"spectrum", "propagate", "expect", "reduce", "amplifier"}) app.add_subcommand(name)->fallthrough();
    app.get_subcommand("spectrum")->description("density on a grid and moments");
    app.get_subcommand("propagate")->description("matrix elements of exp(-i H_I t)");
    app.get_subcommand("expect")->description("expectation values along a time grid");
    app.get_subcommand("reduce")->description("reduce a multimode system to its ladder");
    app.get_subcommand("amplifier")->description("two-mode amplifier photon number, closed form against oracle");

    CLI11_PARSE(app, argc, argv);
    if (*tol_opt) opt.tol = tol;

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        if (gnuplot && out_path.empty()) throw cli::ConfigError("--gnuplot needs --out", "--gnuplot");
        if (gnuplot && format != "csv") throw cli::ConfigError("--gnuplot needs --format csv", "--gnuplot");
        auto cfg = cli::Config::from_file(config_path);
        auto table = cli::run(command, cfg, opt);
        auto style = floats == "shortest" ? cli::FloatStyle::Shortest : cli::FloatStyle::Fixed17;
        std::string text = format == "json" ? cli::to_json(table) : cli::to_csv(table, style);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream(out_path, std::ios::binary) << text;
            if (gnuplot) std::ofstream(out_path + ".gp") << cli::gnuplot_script(table, out_path);
        }
        if (!table.ok()) {
            std::cerr << cli::tolerance_report(table);
            return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << cli::error_report(e);
        return 2;
    }
    return 0;
}
