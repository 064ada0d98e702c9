#include <CLI11.hpp>
#include <iostream>

#include "nlrs_cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Ground states and concentration for the nonlocal regional Schrodinger equation"};
    app.require_subcommand(1, 1);

    std::string config_path;
    nlrs::cli::RunFlags flags;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    for (const auto& name : nlrs::cli::subcommand_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory (overrides [output] dir)");
        sub->add_option("--seed", seed, "Random seed (overrides [solver] seed)");
        sub->add_option("--threads", threads, "Thread budget (overrides [solver] threads)")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", flags.quiet, "Suppress progress output");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    const auto* sub = app.get_subcommands().front();
    if (sub->count("--seed")) flags.seed = seed;
    if (sub->count("--threads")) flags.threads = threads;
    if (sub->count("--out")) flags.out = out;

    nlrs::cli::RunConfig config;
    try {
        config = nlrs::cli::apply_flags(nlrs::cli::parse_config(config_path), flags);
    } catch (const std::exception& e) {
        std::cerr << nlrs::cli::error_json(command, e.what());
        return 2;
    }
    return nlrs::cli::run_subcommand(command, config, flags.quiet, std::cerr);
}
