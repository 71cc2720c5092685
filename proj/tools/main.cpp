#include "commands.hpp"
#include "config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
    using namespace choquard::cli;

    CLI::App app{"Groundstates and threshold certificates for the critical Choquard equation"};
    app.require_subcommand(1, 1);
    app.allow_extras();

    std::string config_path;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    app.add_option("--config", config_path, "configuration file (key = value)")->check(CLI::ExistingFile);
    app.add_option("--output", output, "output directory");
    app.add_option("--seed", seed, "base random seed");
    app.add_option("--threads", threads, "kernel assembly threads");
    app.fallthrough();

    std::string profile;
    const char* names[][2] = {{"constants", "print the sharp constants and the critical threshold"},
                              {"solve", "compute a groundstate candidate (multistart)"},
                              {"continue", "exponent continuation toward the critical power"},
                              {"bubble", "Talenti bubble sweep and threshold strictness"},
                              {"check", "re-certify a stored profile CSV"},
                              {"hls-test", "randomized Hardy-Littlewood-Sobolev suite"}};
    for (const auto& [name, help] : names) {
        auto* sub = app.add_subcommand(name, help);
        sub->allow_extras();
        if (std::string(name) == "check") sub->add_option("profile", profile, "profile CSV written by solve");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInvalid;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        std::vector<std::string> extras = app.remaining();
        for (auto* sub : app.get_subcommands()) {
            const auto more = sub->remaining();
            extras.insert(extras.end(), more.begin(), more.end());
        }
        apply_overrides(cfg, extras);
        if (!output.empty()) cfg.output_dir = output;
        if (seed) cfg.solver.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (!profile.empty()) cfg.profile = profile;
        cfg.solver.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }

    return run(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
}
