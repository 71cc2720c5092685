#pragma once

/// \file bubbles.hpp
/// \brief Cut-off Talenti bubbles u_eps = phi U_eps and the energy estimates
///        built on them: asymptotics as eps -> 0, the two-term fiber bound,
///        the strict threshold inequality and the scaling of the F-term.

#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/riesz.hpp"

#include <string>
#include <vector>

namespace choquard {

/// U_eps(r) = (N(N-2) eps^2)^{(N-2)/4} / (eps^2 + r^2)^{(N-2)/2}.
double talenti(const DimensionPair& d, double epsilon, double r);

/// Cutoff equal to 1 on [0, 1], 0 on [2, inf), quintic smoothstep in between.
double bubble_cutoff(double r);

struct BubbleProfile {
    double epsilon = 0;
    RadialFunction profile;
};

/// Minimum nodes the grid must place in [0, eps].
inline constexpr std::size_t kBubbleNodesPerEpsilon = 32;

/// Throws std::invalid_argument when fewer than 32 nodes lie in [0, eps] or the grid ends before r = 2.
BubbleProfile make_bubble(const DimensionPair& d, double epsilon, GridPtr grid);

/// Grid for bubble sweeps: support [0, 2] plus margin, nodes pinned at r = 1 and 2,
/// graded so that the smallest epsilon is resolved.
GridPtr bubble_grid(const DimensionPair& d, double smallest_epsilon, std::size_t cells = 2048);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct AsymptoticsReport {
    std::vector<double> epsilons;          ///< decreasing
    std::vector<double> kinetic;           ///< int |grad u_eps|^2
    std::vector<double> kinetic_errors;    ///< |kinetic - S^{N/2}|
    std::vector<double> mass_values;       ///< int u_eps^2
    std::vector<double> critical_mass;     ///< int |u_eps|^{2N/(N-2)}
    std::vector<double> nonlocal_values;   ///< int (I_alpha * |u|^{p^*}) |u|^{p^*}
    std::vector<double> nonlocal_errors;   ///< |nonlocal - (A C)^{N/2} S_alpha^{(N+alpha)/2}|
    double kinetic_limit = 0;              ///< S^{N/2}
    double nonlocal_limit = 0;
    double kinetic_order = 0;
    double mass_order = 0;                 ///< slope of the mass law (after dividing |ln eps| for N = 4)
    double nonlocal_order = 0;
    bool sobolev_ok = false;               ///< kinetic >= S ||u||_{2N/(N-2)}^2 for every eps
    bool degenerate = false;               ///< some fitted error sits at quadrature noise
    std::string note;
};

/// Requires >= 3 epsilons; orders are fitted on the smallest three.
AsymptoticsReport verify_asymptotics(const DimensionPair& d, const std::vector<double>& epsilons, const RieszOperator& op);

struct FiberBound {
    double max_j = 0;   ///< max_tau tau^{N-2} a/2 - tau^{N+alpha} mu^2 c/2 (numerical maximization)
    double bound = 0;   ///< closed form of the same maximum
    double tau = 0;     ///< maximizer
};

FiberBound two_term_fiber(const DimensionPair& d, double mu, double a, double c);
FiberBound fiber_bound_check(const DimensionPair& d, double mu, const BubbleProfile& bubble, const RieszOperator& op);

struct StrictnessReport {
    std::vector<double> epsilons;
    std::vector<double> sup_values;       ///< sup_tau I((u_eps)_tau), full nonlinearity
    std::vector<double> sup_values_pure;  ///< same with F = 0
    std::vector<double> taus;             ///< maximizing tau per eps
    double best_sup = 0;
    double threshold = 0;
    bool strict = false;                  ///< best_sup < threshold
    bool strict_smallest_two = false;     ///< sup < threshold at both of the two smallest eps
    double tau_lo = 0;
    double tau_hi = 0;
};

/// pp must be critical and satisfy (f4); throws std::invalid_argument otherwise.
StrictnessReport threshold_strictness(const ProblemParams& pp, const RieszOperator& op, const std::vector<double>& epsilons);

struct FContribution {
    std::vector<double> epsilons;
    std::vector<double> pairing;             ///< int (I_alpha * |u|^{p^*}) F(u)
    std::vector<double> restricted_pairing;  ///< same over B_eps x B_eps
    double order = 0;
    double restricted_order = 0;
    double reference_order = 0;              ///< 1 (N = 3), 2 otherwise
    bool no_f_term = false;
    bool ok = false;                         ///< order <= reference_order + 0.3
};

FContribution f_contribution_scaling(const DimensionPair& d, const PowerNonlinearity& nl, const std::vector<double>& epsilons,
                                     const RieszOperator& op);

}  // namespace choquard
