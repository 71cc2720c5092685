#include "choquard/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace choquard {

namespace {

// |s|^e as exp(e ln|s|) with 0 -> 0, so non-integer exponents never produce NaN.
double abs_pow(double s, double e) {
    const double a = std::abs(s);
    return a == 0.0 ? 0.0 : std::exp(e * std::log(a));
}

double signed_pow(double s, double e) { return std::copysign(abs_pow(s, e), s); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

}  // namespace

double PowerNonlinearity::primitive(double s) const { return nu == 0.0 ? 0.0 : nu * abs_pow(s, q) / q; }

double PowerNonlinearity::derivative(double s) const { return nu == 0.0 ? 0.0 : nu * signed_pow(s, q - 1.0); }

bool ConditionReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.pass; });
}

const ConditionCheck& ConditionReport::at(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no condition named " + name);
}

ConditionReport validate_conditions(const PowerNonlinearity& nl, const DimensionPair& d) {
    ConditionReport rep;
    const double lo = d.lower_exponent();
    const double hi = d.upper_exponent();
    const int n = d.n();
    const double alpha = d.alpha();

    const bool finite = std::isfinite(nl.nu) && std::isfinite(nl.q);
    rep.checks.push_back({"f1", finite && nl.nu >= 0.0,
                          nl.nu >= 0.0 ? "f odd and nonnegative on (0, inf)" : "nu = " + fmt(nl.nu) + " makes f negative"});

    if (nl.nu == 0.0) {
        rep.checks.push_back({"f2", true, "vacuous for F = 0"});
        rep.checks.push_back({"f3", true, "vacuous for F = 0"});
        rep.checks.push_back({"f4", false, "F = 0 has no lower growth"});
        rep.note = "pure-critical problem: no lower-order term to push the level below the threshold";
        return rep;
    }

    const bool in_range = nl.q > lo && nl.q < hi;
    const std::string range = "q = " + fmt(nl.q) + " must lie in (" + fmt(lo) + ", " + fmt(hi) + ")";
    rep.checks.push_back({"f2", in_range, range + " for the growth at 0"});
    rep.checks.push_back({"f3", in_range, range + " for the growth at infinity"});

    double bound = 0.0;
    if (n >= 5) {
        bound = (n + alpha - 4.0) / (n - 2.0);
    } else if (n == 4) {
        bound = alpha / 2.0;
    } else {
        bound = 1.0 + alpha;
    }
    rep.checks.push_back({"f4", nl.q > bound, "q = " + fmt(nl.q) + " must exceed " + fmt(bound)});
    return rep;
}

ProblemParams::ProblemParams(DimensionPair d, double kappa, double mu, double p, PowerNonlinearity nl)
    : d_(d), kappa_(kappa), mu_(mu), p_(p), nl_(nl) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive, got " + fmt(kappa));
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be positive, got " + fmt(mu));
    const double lo = d.lower_exponent();
    const double hi = d.upper_exponent();
    if (!(p > lo && p <= hi * (1.0 + 1e-14))) {
        throw std::invalid_argument("p = " + fmt(p) + " outside (p_*, p^*] = (" + fmt(lo) + ", " + fmt(hi) + "]");
    }
    if (!(nl.nu >= 0.0) || !std::isfinite(nl.nu)) throw std::invalid_argument("nu must be >= 0, got " + fmt(nl.nu));
    if (nl.nu > 0.0 && !(nl.q > 1.0)) throw std::invalid_argument("q must exceed 1, got " + fmt(nl.q));
    constants_ = constants_report(d, mu);
}

bool ProblemParams::critical() const { return std::abs(p_ - d_.upper_exponent()) <= 1e-12 * d_.upper_exponent(); }

double ProblemParams::source(double s) const { return mu_ * abs_pow(s, p_) + nl_.primitive(s); }

double ProblemParams::source_derivative(double s) const { return p_ * mu_ * signed_pow(s, p_ - 1.0) + nl_.derivative(s); }

double ProblemParams::source_second_derivative(double s) const {
    double out = p_ * (p_ - 1.0) * mu_ * abs_pow(s, p_ - 2.0);
    if (nl_.nu != 0.0) out += nl_.nu * (nl_.q - 1.0) * abs_pow(s, nl_.q - 2.0);
    return out;
}

EnergyBreakdown make_breakdown(double a, double b, double c, const DimensionPair& d) {
    const double n = d.n();
    const double alpha = d.alpha();
    EnergyBreakdown eb;
    eb.kinetic = a;
    eb.mass = b;
    eb.nonlocal = c;
    eb.energy = 0.5 * (a + b - c);
    eb.pohozaev = 0.5 * ((n - 2.0) * a + n * b - (n + alpha) * c);
    return eb;
}

Evaluation evaluate(const ProblemParams& pp, const RieszOperator& op, const RadialFunction& u) {
    require_same_grid(op.grid(), u.grid());
    const std::size_t m = u.size();
    Evaluation ev;
    ev.source.resize(m);
    ev.source_grad.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        ev.source[i] = pp.source(u[i]);
        ev.source_grad[i] = pp.source_derivative(u[i]);
        if (!std::isfinite(ev.source[i]) || !std::isfinite(ev.source_grad[i]))
            throw std::domain_error("nonlinearity produced a non-finite value");
    }
    ev.potential = op.apply(ev.source);
    const auto h1 = h1_seminorms(u);
    const auto w = u.grid().weights();
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) c += w[i] * ev.source[i] * ev.potential[i];
    ev.breakdown = make_breakdown(h1.kinetic, pp.kappa() * h1.mass, c, pp.dims());
    return ev;
}

EnergyBreakdown energy_breakdown(const ProblemParams& pp, const RieszOperator& op, const RadialFunction& u) {
    return evaluate(pp, op, u).breakdown;
}

std::vector<double> energy_gradient(const ProblemParams& pp, const RadialFunction& u, const Evaluation& ev) {
    auto grad = u.grid().apply_stiffness(u.values());
    const auto w = u.grid().weights();
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad[i] += w[i] * (pp.kappa() * u[i] - ev.potential[i] * ev.source_grad[i]);
    }
    return grad;
}

double el_residual(const RadialFunction& u, const std::vector<double>& gradient) {
    const auto w = u.grid().weights();
    double num = 0.0;
    for (std::size_t i = 0; i < gradient.size(); ++i) {
        if (w[i] > 0.0) num += gradient[i] * gradient[i] / w[i];
    }
    const double norm = h1_norm(u);
    if (!(norm > 1e-150)) throw std::invalid_argument("el_residual: profile is numerically zero");
    return std::sqrt(num) / norm;
}

double el_residual(const ProblemParams& pp, const RieszOperator& op, const RadialFunction& u) {
    const auto ev = evaluate(pp, op, u);
    return el_residual(u, energy_gradient(pp, u, ev));
}

double pohozaev_residual(const EnergyBreakdown& eb, const RadialFunction& u) {
    const double norm = h1_norm(u);
    if (!(norm > 1e-150)) throw std::invalid_argument("pohozaev_residual: profile is numerically zero");
    return std::abs(eb.pohozaev) / (norm * norm);
}

double fiber_map(const EnergyBreakdown& eb, const DimensionPair& d, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("fiber_map: tau must be >= 0");
    const double n = d.n();
    return 0.5 * (std::pow(tau, n - 2.0) * eb.kinetic + std::pow(tau, n) * eb.mass -
                  std::pow(tau, n + d.alpha()) * eb.nonlocal);
}

double fiber_derivative(const EnergyBreakdown& eb, const DimensionPair& d, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("fiber_derivative: tau must be >= 0");
    const double n = d.n();
    const double a = d.alpha();
    return 0.5 * ((n - 2.0) * std::pow(tau, n - 3.0) * eb.kinetic + n * std::pow(tau, n - 1.0) * eb.mass -
                  (n + a) * std::pow(tau, n + a - 1.0) * eb.nonlocal);
}

double fiber_second_derivative(const EnergyBreakdown& eb, const DimensionPair& d, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("fiber_second_derivative: tau must be > 0");
    const double n = d.n();
    const double a = d.alpha();
    return 0.5 * ((n - 2.0) * (n - 3.0) * std::pow(tau, n - 4.0) * eb.kinetic +
                  n * (n - 1.0) * std::pow(tau, n - 2.0) * eb.mass -
                  (n + a) * (n + a - 1.0) * std::pow(tau, n + a - 2.0) * eb.nonlocal);
}

EnergyBreakdown dilated_breakdown(const EnergyBreakdown& eb, const DimensionPair& d, double tau) {
    const double n = d.n();
    return make_breakdown(std::pow(tau, n - 2.0) * eb.kinetic, std::pow(tau, n) * eb.mass,
                          std::pow(tau, n + d.alpha()) * eb.nonlocal, d);
}

double project_pohozaev(const EnergyBreakdown& eb, const DimensionPair& d) {
    if (!(eb.nonlocal > 0.0)) throw std::domain_error("no projection exists: nonlocal term c = 0, the fiber map is increasing");
    if (!(eb.kinetic > 0.0)) throw std::domain_error("degenerate profile: kinetic term a = 0");
    const double n = d.n();
    const double alpha = d.alpha();
    // phi'(tau) = tau^{N-1} chi(tau) / 2 with chi strictly decreasing on (0, inf).
    auto chi = [&](double t) { return (n - 2.0) * eb.kinetic / (t * t) + n * eb.mass - (n + alpha) * eb.nonlocal * std::pow(t, alpha); };
    auto dchi = [&](double t) {
        return -2.0 * (n - 2.0) * eb.kinetic / (t * t * t) - alpha * (n + alpha) * eb.nonlocal * std::pow(t, alpha - 1.0);
    };
    double lo = 1.0;
    double hi = 1.0;
    while (chi(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw std::domain_error("project_pohozaev: no sign change found");
    }
    while (chi(lo) < 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) throw std::domain_error("project_pohozaev: no sign change found");
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double v = chi(t);
        if (v > 0.0) lo = t; else hi = t;
        double next = t - v / dchi(t);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - t);
        t = next;
        if (step <= 1e-14 * t || hi - lo <= 1e-15 * t) break;
    }
    return t;
}

double projected_energy(const EnergyBreakdown& eb, const DimensionPair& d) {
    return fiber_map(eb, d, project_pohozaev(eb, d));
}

double young_split_bound(double s, double p, const DimensionPair& d) {
    const double lo = d.lower_exponent();
    const double hi = d.upper_exponent();
    if (!(p >= lo && p <= hi)) throw std::invalid_argument("young_split_bound: p outside [p_*, p^*]");
    const double t = (hi - p) / (hi - lo);
    return t * abs_pow(s, lo) + (1.0 - t) * abs_pow(s, hi);
}

double pohozaev_decomposition(const EnergyBreakdown& eb, const DimensionPair& d) {
    return eb.energy - eb.pohozaev / (d.n() + d.alpha());
}

}  // namespace choquard
