#include "hma/commands.hpp"
#include "hma/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic Monge-Ampere solver suite"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int workers = 1;
    bool deterministic = false;

    for (const auto& name : hma::cli::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("config", config_path, "key = value configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides run.out)");
        sub->add_option("--workers", workers, "worker threads for node updates")->check(CLI::PositiveNumber);
        sub->add_flag("--deterministic", deterministic, "single-threaded, reproducible run");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : hma::cli::exit_usage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    hma::RunConfig config;
    try {
        config = hma::RunConfig::load(config_path);
    } catch (const hma::Error& e) {
        std::cerr << "hma: " << e.what() << "\n";
        return e.kind() == hma::ErrorKind::io ? hma::cli::exit_io : hma::cli::exit_usage;
    }

    hma::cli::RunOptions options;
    options.out = !out_dir.empty() ? out_dir : config.get("run.out", "out");
    options.workers = config.integer("run.workers", workers);
    if (workers != 1) options.workers = workers;
    options.deterministic = deterministic || config.flag("run.deterministic", false);

    const int code = hma::cli::run(command, config, options, std::cerr);
    if (code == 0) std::cout << command << ": ok (" << options.out.string() << ")\n";
    return code;
}
