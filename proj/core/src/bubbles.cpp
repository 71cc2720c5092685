#include "choquard/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace choquard {

namespace {

std::vector<double> powered(const RadialFunction& u, double e) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(std::abs(u[i]), e);
    return out;
}

double weighted_dot(const RadialGrid& g, const std::vector<double>& a, const std::vector<double>& b) {
    const auto w = g.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

// Smallest three epsilons, the asymptotic regime.
template <class T>
std::vector<T> tail3(const std::vector<T>& v) {
    return std::vector<T>(v.end() - 3, v.end());
}

void check_epsilons(const std::vector<double>& eps) {
    if (eps.size() < 3) throw std::invalid_argument("need at least three epsilons");
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0)) throw std::invalid_argument("epsilons must be positive");
        if (k > 0 && !(eps[k] < eps[k - 1])) throw std::invalid_argument("epsilons must decrease strictly");
    }
}

}  // namespace

double talenti(const DimensionPair& d, double epsilon, double r) {
    const double n = d.n();
    return std::pow(n * (n - 2.0) * epsilon * epsilon, 0.25 * (n - 2.0)) / std::pow(epsilon * epsilon + r * r, 0.5 * (n - 2.0));
}

double bubble_cutoff(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double t = r - 1.0;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

BubbleProfile make_bubble(const DimensionPair& d, double epsilon, GridPtr grid) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("make_bubble: epsilon must be positive");
    if (grid->radius() < 2.0) throw std::invalid_argument("make_bubble: grid must reach r = 2");
    const std::size_t inside = grid->lower_index(std::nextafter(epsilon, std::numeric_limits<double>::infinity()));
    if (inside < kBubbleNodesPerEpsilon) {
        std::ostringstream msg;
        msg << "grid under-resolves epsilon = " << epsilon << ": " << inside << " nodes in [0, eps], need at least "
            << kBubbleNodesPerEpsilon << " (first spacing must be <= about eps / " << kBubbleNodesPerEpsilon << ")";
        throw std::invalid_argument(msg.str());
    }
    auto u = RadialFunction::sample(std::move(grid), [&](double r) { return bubble_cutoff(r) * talenti(d, epsilon, r); });
    return {epsilon, std::move(u)};
}

GridPtr bubble_grid(const DimensionPair& d, double smallest_epsilon, std::size_t cells) {
    GridSpec spec;
    spec.cells = cells;
    spec.radius = 2.5;
    spec.growth = 1.01;
    spec.pins = {1.0, 2.0};
    for (spec.max_ratio = 50.0; spec.max_ratio < 1e8; spec.max_ratio *= 2.0) {
        auto g = RadialGrid::make(d.n(), spec);
        // A margin of two nodes over the minimum keeps the pin remap from tipping the count.
        if (g->lower_index(smallest_epsilon) >= kBubbleNodesPerEpsilon + 2) return g;
    }
    throw std::invalid_argument("bubble_grid: cannot resolve epsilon with the requested cell count");
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 aligned points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

AsymptoticsReport verify_asymptotics(const DimensionPair& d, const std::vector<double>& epsilons, const RieszOperator& op) {
    check_epsilons(epsilons);
    const int n = d.n();
    const double pstar = d.upper_exponent();
    const double crit = d.sobolev_exponent();
    const auto consts = constants_report(d, 1.0);

    AsymptoticsReport rep;
    rep.epsilons = epsilons;
    rep.kinetic_limit = std::pow(consts.sobolev_s, 0.5 * n);
    rep.nonlocal_limit =
        std::pow(consts.a_alpha * consts.c_alpha, 0.5 * n) * std::pow(consts.s_alpha, 0.5 * (n + d.alpha()));
    rep.sobolev_ok = true;
    for (double eps : epsilons) {
        const auto b = make_bubble(d, eps, op.grid_ptr());
        const auto h1 = h1_seminorms(b.profile);
        const auto up = powered(b.profile, pstar);
        const double nonlocal = weighted_dot(op.grid(), up, op.apply(up));
        const double lcrit = lq_norm(b.profile, crit);
        rep.kinetic.push_back(h1.kinetic);
        rep.kinetic_errors.push_back(std::abs(h1.kinetic - rep.kinetic_limit));
        rep.mass_values.push_back(h1.mass);
        rep.critical_mass.push_back(std::pow(lcrit, crit));
        rep.nonlocal_values.push_back(nonlocal);
        rep.nonlocal_errors.push_back(std::abs(nonlocal - rep.nonlocal_limit));
        rep.sobolev_ok = rep.sobolev_ok && h1.kinetic >= consts.sobolev_s * lcrit * lcrit;
    }

    const auto e3 = tail3(epsilons);
    for (double err : tail3(rep.kinetic_errors)) rep.degenerate = rep.degenerate || err < 1e-10 * rep.kinetic_limit;
    for (double err : tail3(rep.nonlocal_errors)) rep.degenerate = rep.degenerate || err < 1e-10 * rep.nonlocal_limit;
    if (rep.degenerate) rep.note = "fit degenerate: errors at quadrature noise level";

    rep.kinetic_order = loglog_slope(e3, tail3(rep.kinetic_errors));
    rep.nonlocal_order = loglog_slope(e3, tail3(rep.nonlocal_errors));
    auto mass = tail3(rep.mass_values);
    if (n == 4) {
        for (std::size_t k = 0; k < 3; ++k) mass[k] /= std::abs(std::log(e3[k]));
    }
    rep.mass_order = loglog_slope(e3, mass);
    return rep;
}

FiberBound two_term_fiber(const DimensionPair& d, double mu, double a, double c) {
    if (!(a > 0.0 && c > 0.0 && mu > 0.0)) throw std::invalid_argument("two_term_fiber: a, c, mu must be positive");
    const double n = d.n();
    const double alpha = d.alpha();
    const double cc = mu * mu * c;
    auto j = [&](double t) { return 0.5 * (std::pow(t, n - 2.0) * a - std::pow(t, n + alpha) * cc); };
    auto dj = [&](double t) { return (n - 2.0) * std::pow(t, n - 3.0) * a - (n + alpha) * std::pow(t, n + alpha - 1.0) * cc; };

    // Bisection on the sign change of J'.
    double lo = 1.0, hi = 1.0;
    while (dj(hi) > 0.0) hi *= 2.0;
    while (dj(lo) < 0.0) lo *= 0.5;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dj(mid) > 0.0 ? lo : hi) = mid;
    }
    FiberBound out;
    out.tau = 0.5 * (lo + hi);
    out.max_j = j(out.tau);
    out.bound = (2.0 + alpha) / (2.0 * (n + alpha)) * std::pow((n - 2.0) / (n + alpha), (n - 2.0) / (2.0 + alpha)) *
                std::pow(mu, -2.0 * (n - 2.0) / (2.0 + alpha)) * std::pow(a, (n + alpha) / (2.0 + alpha)) /
                std::pow(c, (n - 2.0) / (2.0 + alpha));
    return out;
}

FiberBound fiber_bound_check(const DimensionPair& d, double mu, const BubbleProfile& bubble, const RieszOperator& op) {
    require_same_grid(op.grid(), bubble.profile.grid());
    const auto up = powered(bubble.profile, d.upper_exponent());
    const double c = weighted_dot(op.grid(), up, op.apply(up));
    return two_term_fiber(d, mu, h1_seminorms(bubble.profile).kinetic, c);
}

StrictnessReport threshold_strictness(const ProblemParams& pp, const RieszOperator& op, const std::vector<double>& epsilons) {
    if (!pp.critical()) throw std::invalid_argument("threshold_strictness needs p = p^*");
    const auto cond = validate_conditions(pp.nonlinearity(), pp.dims());
    if (!cond.at("f4").pass) {
        throw std::invalid_argument("threshold_strictness: the bubble estimate needs the lower growth condition (f4): " +
                                    cond.at("f4").detail);
    }
    check_epsilons(epsilons);
    const auto pure = pp.with_nonlinearity({0.0, pp.nonlinearity().q});

    StrictnessReport rep;
    rep.epsilons = epsilons;
    rep.threshold = pp.constants().threshold;
    rep.best_sup = std::numeric_limits<double>::infinity();
    rep.tau_lo = std::numeric_limits<double>::infinity();
    rep.tau_hi = 0.0;
    for (double eps : epsilons) {
        const auto b = make_bubble(pp.dims(), eps, op.grid_ptr());
        const auto eb = energy_breakdown(pp, op, b.profile);
        const double tau = project_pohozaev(eb, pp.dims());
        const double sup = fiber_map(eb, pp.dims(), tau);
        rep.sup_values.push_back(sup);
        rep.sup_values_pure.push_back(projected_energy(energy_breakdown(pure, op, b.profile), pp.dims()));
        rep.taus.push_back(tau);
        rep.best_sup = std::min(rep.best_sup, sup);
        rep.tau_lo = std::min(rep.tau_lo, tau);
        rep.tau_hi = std::max(rep.tau_hi, tau);
    }
    rep.strict = rep.best_sup < rep.threshold;
    const std::size_t k = rep.sup_values.size();
    rep.strict_smallest_two = rep.sup_values[k - 1] < rep.threshold && rep.sup_values[k - 2] < rep.threshold;
    return rep;
}

FContribution f_contribution_scaling(const DimensionPair& d, const PowerNonlinearity& nl, const std::vector<double>& epsilons,
                                     const RieszOperator& op) {
    check_epsilons(epsilons);
    FContribution out;
    out.epsilons = epsilons;
    out.reference_order = d.n() == 3 ? 1.0 : 2.0;
    if (nl.nu == 0.0) {
        out.no_f_term = true;
        out.order = out.restricted_order = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const auto& g = op.grid();
    const auto& w = op.weighted();
    const auto weights = g.weights();
    for (double eps : epsilons) {
        const auto b = make_bubble(d, eps, op.grid_ptr());
        const auto up = powered(b.profile, d.upper_exponent());
        std::vector<double> f(up.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = nl.primitive(b.profile[i]);
        out.pairing.push_back(weighted_dot(g, f, op.apply(up)));

        const std::size_t inside = g.lower_index(eps);
        double restricted = 0.0;
        for (std::size_t i = 0; i < inside; ++i) {
            double pot = 0.0;
            for (std::size_t j = 0; j < inside; ++j)
                pot += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * up[j];
            restricted += weights[i] * f[i] * pot;
        }
        out.restricted_pairing.push_back(restricted);
    }
    const auto e3 = tail3(epsilons);
    out.order = loglog_slope(e3, tail3(out.pairing));
    out.restricted_order = loglog_slope(e3, tail3(out.restricted_pairing));
    out.ok = out.order <= out.reference_order + 0.3;
    return out;
}

}  // namespace choquard
