#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rovella/cli.hpp"
#include "rovella/errors.hpp"

namespace cli = rovella::cli;

int main(int argc, char** argv) {
    CLI::App app{"Thermodynamic formalism for contracting Lorenz flows"};
    app.set_version_flag("--version", std::string(cli::tool_version));
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = ".";
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker threads for pressure sampling")->check(CLI::Range(1, 256));
    app.add_option("--seed", seed, "seed for sampled checks (overrides the config)");

    app.add_subcommand("validate", "check the cusp-map conditions");
    auto* simulate = app.add_subcommand("simulate", "integrate the model flow from a section point");
    std::optional<double> x0;
    std::optional<double> y0;
    std::optional<std::size_t> returns;
    simulate->add_option("--x0", x0, "section x coordinate");
    simulate->add_option("--y0", y0, "section y coordinate");
    simulate->add_option("--returns", returns, "number of section returns");
    app.add_subcommand("pressure", "sample the pressure function and its admissible range");
    app.add_subcommand("spectrum", "Lyapunov spectrum of the interval map and the flow");
    auto* lift = app.add_subcommand("lift", "lift an equilibrium state to the flow");
    std::optional<double> t;
    lift->add_option("--t", t, "potential parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::exit_ok : cli::exit_usage;
    }

    cli::CommandContext ctx;
    try {
        if (!config_path.empty()) ctx.config = cli::load_config(config_path);
        // command-line overrides enter the config hash like any other key
        if (seed) ctx.config.set("seed", std::to_string(*seed));
        if (x0) ctx.config.set("x0", cli::format_number(*x0));
        if (y0) ctx.config.set("y0", cli::format_number(*y0));
        if (returns) ctx.config.set("n_returns", std::to_string(*returns));
        if (t) ctx.config.set("t", cli::format_number(*t));
    } catch (const rovella::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_usage;
    }
    ctx.out = out_dir;
    ctx.jobs = jobs;
    return cli::run_command(app.get_subcommands().front()->get_name(), ctx);
}
