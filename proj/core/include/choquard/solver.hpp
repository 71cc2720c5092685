#pragma once

/// \file solver.hpp
/// \brief Groundstate candidates: minimization of max_tau I(u_tau), exponent
///        continuation toward the critical power, and solution certificates.

#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/riesz.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace choquard {

struct SolveOptions {
    int max_iterations = 4000;   ///< descent iterations
    double step = 1.0;           ///< initial descent step
    double shrink = 0.5;         ///< backtracking factor
    double el_tol = 1e-3;
    double pohozaev_tol = 1e-6;
    std::uint64_t seed = 1;
    int starts = 3;              ///< multistart count
    /// Descent hands over to Newton once the preconditioned gradient norm drops below this.
    double handover_tol = 2e-5;
    int newton_iterations = 12;
    /// Re-project onto P = 0 once the fiber maximizer leaves [1 - drift, 1 + drift].
    double projection_drift = 0.02;

    void validate() const;
};

/// Raised when the iteration hits one of the two non-compact alternatives
/// (vanishing c -> 0 or concentration tau_0 -> infinity).
class SolveError : public std::runtime_error {
public:
    enum class Kind { vanishing, concentration };
    SolveError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct SolveReport {
    explicit SolveReport(RadialFunction u) : profile(std::move(u)) {}

    RadialFunction profile;
    EnergyBreakdown breakdown;
    double m_p = 0;
    double el_residual = 0;
    double pohozaev_residual = 0;
    bool converged = false;
    bool positive = false;
    bool radially_nonincreasing = false;
    bool decay_bound_ok = false;
    bool below_threshold = false;
    int iterations = 0;
    int newton_iterations = 0;
    double truncation = 0;  ///< |u(R)| / max |u|
    std::uint64_t seed = 0;
    std::string status;
    /// Projected energy before and after every accepted descent step.
    struct Step {
        double before = 0;
        double after = 0;
    };
    std::vector<Step> energy_log;
};

/// Gaussian start e^{-r^2/(2 s^2)} normalized in L^2, width s drawn from the seed.
RadialFunction initial_guess(GridPtr grid, std::uint64_t seed);

SolveReport minimize(const ProblemParams& pp, const RieszOperator& op, const RadialFunction& init, const SolveOptions& opts);

struct MultistartReport {
    SolveReport best;
    std::vector<double> energies;         ///< m_p per start
    std::vector<std::uint64_t> seeds;
    double spread = 0;                    ///< (max - min) / min over converged starts
};

/// opts.starts solves from initial_guess(seed + k); best converged energy wins.
MultistartReport multistart(const ProblemParams& pp, const RieszOperator& op, const SolveOptions& opts);

/// Fills positive / radially_nonincreasing / decay_bound_ok / below_threshold and the residuals.
SolveReport certify(const ProblemParams& pp, const RieszOperator& op, SolveReport rep);

struct ContinuationEntry {
    double p = 0;
    double m_p = 0;
    double el_residual = 0;
    double pohozaev_residual = 0;
    bool converged = false;
    EnergyBreakdown breakdown;
    std::string status;
};

struct ContinuationReport {
    std::vector<double> p_values;
    std::vector<double> m_values;
    std::vector<ContinuationEntry> entries;
    double limit_estimate = 0;           ///< m_p at the last schedule entry
    double monotonicity_diagnostic = 0;  ///< max_n (m_{n+1} - m_n)
    /// max over the last two subcritical entries of m_p / m_{p^*}; unset without a critical entry.
    std::optional<double> tail_ratio;
    std::optional<SolveReport> last;
};

/// Warm-started solves along an increasing schedule in (p_*, p^*].
ContinuationReport continuation(const ProblemParams& pp_template, const RieszOperator& op, const std::vector<double>& schedule,
                                const SolveOptions& opts);

}  // namespace choquard
