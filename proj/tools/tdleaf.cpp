#include <iostream>

#include <CLI11.hpp>

#include "tdleaf/cli/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"TDLeaf(lambda) training and evaluation runs"};
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    bool quiet = false;
    app.add_option("--config", config, "run configuration (JSON)")->required();
    auto* seed_opt = app.add_option("--seed", seed, "override the config's seed");
    auto* out_opt = app.add_option("--out", out, "override the config's out_dir");
    app.add_flag("--quiet", quiet, "print nothing on success");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    tdleaf::cli::Overrides overrides;
    if (*seed_opt) overrides.seed = seed;
    if (*out_opt) overrides.out_dir = out;
    try {
        const auto cfg = tdleaf::cli::load_config(config, overrides);
        return tdleaf::cli::run(cfg, std::cout, quiet);
    } catch (const tdleaf::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
