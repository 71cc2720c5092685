#pragma once

// Run configuration: flat `key = value` text with dotted keys, optional
// `[section]` headers that prefix the keys below them, and `#` comments.
// Unknown keys are errors.

#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace choquard::cli {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    // problem
    int n = 3;
    double alpha = 2.0;
    double kappa = 1.0;
    double mu = 1.0;
    double p = 5.0;
    double nu = 1.0;
    double q = 4.0;
    // grid
    std::size_t cells = 2048;
    double radius = 40.0;
    double max_ratio = 1e5;
    double growth = 1.015;
    // solver
    SolveOptions solver;
    // continuation / bubble / hls
    std::vector<double> schedule{4.0, 4.5, 4.75, 4.9, 5.0};
    std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
    std::size_t bubble_cells = 2048;
    int hls_samples = 100;
    std::size_t hls_cells = 2048;
    double hls_radius = 200.0;
    // check
    std::string profile;
    // output / runtime
    std::string output_dir = "choquard-out";
    std::string run_id = "run";
    std::string kernel_cache;
    unsigned threads = 1;

    ProblemParams problem() const;
    GridSpec grid() const;
};

/// Every recognized key, in canonical order.
const std::vector<std::string>& config_keys();

void set_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_value(const RunConfig& cfg, const std::string& key);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& cfg);

/// Applies `--key=value` style overrides (leading dashes optional).
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& args);

/// FNV-1a of the canonical text.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace choquard::cli
