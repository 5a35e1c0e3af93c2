#include "carima/commands.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"C-ARIMA causal effect estimation for daily time series"};
    app.require_subcommand(1);

    carima::CommandOptions options;
    std::string config, out, input, output;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* c = cmd->add_option("--config", config, "JSON configuration file");
        if (config_required) c->required();
        cmd->add_option("--seed", seed, "override the configured seed");
        cmd->add_option("--out", out, "override the output directory");
    };
    auto* gk = app.add_subcommand("gk", "Garman-Klass volatility from an OHLC CSV");
    gk->add_option("--input", input, "CSV with date, open, high, low, close (default: the configured outcome)");
    gk->add_option("--output", output, "output CSV (default: <out>/gk.csv)");
    add_common(gk, false);
    add_common(app.add_subcommand("fit", "fit the configured model on the full sample"), true);
    add_common(app.add_subcommand("analyze", "estimate intervention effects"), true);
    add_common(app.add_subcommand("simulate", "run a Monte Carlo experiment"), true);
    add_common(app.add_subcommand("diagnose", "residual and series diagnostics"), true);

    CLI11_PARSE(app, argc, argv);

    CLI::App* cmd = app.get_subcommands().front();
    options.config = config;
    options.input = input;
    options.output = output;
    if (cmd->count("--seed")) options.seed = seed;
    if (!out.empty()) options.out = out;
    return carima::run_command(cmd->get_name(), options, std::cerr);
}
