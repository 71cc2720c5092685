#pragma once

#include "config.hpp"

#include "choquard/bubbles.hpp"
#include "choquard/solver.hpp"
#include "choquard/specfun.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>

namespace choquard::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kInvalid = 2, kNotConverged = 3 };

json to_json(const ConstantsReport& c);
json to_json(const EnergyBreakdown& eb);
json to_json(const ProblemParams& pp);
json to_json(const SolveReport& rep, const ProblemParams& pp);
json to_json(const ContinuationReport& rep);
json to_json(const AsymptoticsReport& a, const StrictnessReport& s, const FContribution& f);

/// Aligned two-column table of the constants.
std::string constants_table(const ConstantsReport& c);

void write_continuation_csv(std::ostream& out, const ContinuationReport& rep);
void write_bubble_csv(std::ostream& out, const AsymptoticsReport& a, const StrictnessReport& s);

/// gnuplot-ready data files named `<run-id>.<kind>.dat`.
std::filesystem::path emit_profile_dat(const std::filesystem::path& dir, const std::string& run_id, const RadialFunction& u);
std::filesystem::path emit_continuation_dat(const std::filesystem::path& dir, const std::string& run_id, const ContinuationReport& rep);
std::filesystem::path emit_bubble_dat(const std::filesystem::path& dir, const std::string& run_id, const AsymptoticsReport& a,
                                      const StrictnessReport& s);

/// Runs one subcommand; writes artifacts under cfg.output_dir and returns the exit code.
/// Failures leave a `FAILED` marker next to whatever was already written.
int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace choquard::cli
