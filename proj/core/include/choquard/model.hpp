#pragma once

/// \file model.hpp
/// \brief Energy functional of
///   -Delta u + kappa u = (I_alpha * G(u)) g(u),  G(u) = mu |u|^p + F(u),  g = G',
/// its Pohozaev functional, the dilation fiber and the projection onto {P = 0}.

#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"
#include "choquard/specfun.hpp"

#include <string>
#include <vector>

namespace choquard {

/// F(s) = nu |s|^q / q, f(s) = F'(s) = nu |s|^{q-2} s.
struct PowerNonlinearity {
    double nu = 1.0;
    double q = 4.0;

    double primitive(double s) const;
    double derivative(double s) const;
};

struct ConditionCheck {
    std::string name;  ///< "f1" .. "f4"
    bool pass = false;
    std::string detail;
};

struct ConditionReport {
    std::vector<ConditionCheck> checks;
    std::string note;  ///< set for the degenerate nu = 0 case

    bool all_pass() const;
    const ConditionCheck& at(const std::string& name) const;
};

/// Growth conditions on the perturbation F; pure reporting, never throws.
ConditionReport validate_conditions(const PowerNonlinearity& nl, const DimensionPair& d);

class ProblemParams {
public:
    /// Throws std::invalid_argument unless kappa, mu > 0, p in (p_*, p^*] and nu >= 0.
    ProblemParams(DimensionPair d, double kappa, double mu, double p, PowerNonlinearity nl);

    const DimensionPair& dims() const { return d_; }
    double kappa() const { return kappa_; }
    double mu() const { return mu_; }
    double p() const { return p_; }
    const PowerNonlinearity& nonlinearity() const { return nl_; }
    const ConstantsReport& constants() const { return constants_; }
    bool critical() const;

    /// Same problem at another exponent.
    ProblemParams with_p(double p) const { return {d_, kappa_, mu_, p, nl_}; }
    ProblemParams with_nonlinearity(PowerNonlinearity nl) const { return {d_, kappa_, mu_, p_, nl}; }

    /// G(s) = mu |s|^p + F(s).
    double source(double s) const;
    /// g(s) = G'(s) = p mu |s|^{p-2} s + f(s).
    double source_derivative(double s) const;
    /// g'(s).
    double source_second_derivative(double s) const;

private:
    DimensionPair d_;
    double kappa_;
    double mu_;
    double p_;
    PowerNonlinearity nl_;
    ConstantsReport constants_;
};

struct EnergyBreakdown {
    double kinetic = 0;   ///< a = int |grad u|^2
    double mass = 0;      ///< b = kappa int u^2
    double nonlocal = 0;  ///< c = int (I_alpha * G(u)) G(u)
    double energy = 0;    ///< a/2 + b/2 - c/2
    double pohozaev = 0;  ///< (N-2)a/2 + N b/2 - (N+alpha) c/2
};

/// Fills energy and pohozaev from (a, b, c).
EnergyBreakdown make_breakdown(double a, double b, double c, const DimensionPair& d);

/// Pointwise pieces shared by the energy, its gradient and its Hessian.
struct Evaluation {
    EnergyBreakdown breakdown;
    std::vector<double> source;       ///< G(u_i)
    std::vector<double> potential;    ///< (I_alpha * G(u))(r_i)
    std::vector<double> source_grad;  ///< g(u_i)
};

Evaluation evaluate(const ProblemParams& pp, const RieszOperator& op, const RadialFunction& u);
EnergyBreakdown energy_breakdown(const ProblemParams& pp, const RieszOperator& op, const RadialFunction& u);

/// Nodal gradient of the discrete energy: K u + kappa w u - w (I*G) g.
std::vector<double> energy_gradient(const ProblemParams& pp, const RadialFunction& u, const Evaluation& ev);

/// ||-Delta_h u + kappa u - (I_alpha * G(u)) g(u)||_2 / ||u||_{H^1}.
double el_residual(const ProblemParams& pp, const RieszOperator& op, const RadialFunction& u);
double el_residual(const RadialFunction& u, const std::vector<double>& gradient);

/// |P(u)| / ||u||_{H^1}^2.
double pohozaev_residual(const EnergyBreakdown& eb, const RadialFunction& u);

/// phi(tau) = tau^{N-2} a/2 + tau^N b/2 - tau^{N+alpha} c/2.
double fiber_map(const EnergyBreakdown& eb, const DimensionPair& d, double tau);
double fiber_derivative(const EnergyBreakdown& eb, const DimensionPair& d, double tau);
double fiber_second_derivative(const EnergyBreakdown& eb, const DimensionPair& d, double tau);

/// Breakdown of u_tau computed from the scaling laws (no quadrature).
EnergyBreakdown dilated_breakdown(const EnergyBreakdown& eb, const DimensionPair& d, double tau);

/// The unique tau_0 > 0 with phi'(tau_0) = 0. Throws std::domain_error when c = 0
/// (phi increasing, no projection) or a = 0 (degenerate profile).
double project_pohozaev(const EnergyBreakdown& eb, const DimensionPair& d);

/// phi(tau_0) = max_{tau >= 0} phi(tau).
double projected_energy(const EnergyBreakdown& eb, const DimensionPair& d);

/// Right-hand side of |s|^p <= t |s|^{p_*} + (1-t) |s|^{p^*}, t = (p^*-p)/(p^*-p_*).
double young_split_bound(double s, double p, const DimensionPair& d);

/// I(u) - P(u)/(N+alpha), which equals ((2+alpha) a + alpha b) / (2 (N+alpha)).
double pohozaev_decomposition(const EnergyBreakdown& eb, const DimensionPair& d);

}  // namespace choquard
