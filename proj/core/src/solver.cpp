#include "choquard/solver.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

namespace choquard {

namespace {

constexpr double kConcentrationLimit = 1e3;

struct State {
    RadialFunction u;
    Evaluation ev;
    double tau = 1.0;
    double projected = 0.0;
};

State make_state(const ProblemParams& pp, const RieszOperator& op, RadialFunction u) {
    State s{std::move(u), {}, 1.0, 0.0};
    s.ev = evaluate(pp, op, s.u);
    const auto& eb = s.ev.breakdown;
    if (!(eb.nonlocal > std::numeric_limits<double>::min())) {
        throw SolveError(SolveError::Kind::vanishing, "projection lost: nonlocal term vanished (profile collapsed to 0)");
    }
    s.tau = project_pohozaev(eb, pp.dims());
    if (s.tau > kConcentrationLimit || s.tau < 1.0 / kConcentrationLimit) {
        std::ostringstream msg;
        msg << "fiber maximizer tau_0 = " << s.tau << " left [1e-3, 1e3]: profile "
            << (s.tau > 1.0 ? "concentrates" : "spreads out") << " beyond the grid";
        throw SolveError(SolveError::Kind::concentration, msg.str());
    }
    s.projected = fiber_map(eb, pp.dims(), s.tau);
    return s;
}

// Dilates until the discrete Pohozaev value vanishes up to interpolation error.
State reproject(const ProblemParams& pp, const RieszOperator& op, State s, int rounds = 8) {
    for (int k = 0; k < rounds && std::abs(s.tau - 1.0) > 1e-10; ++k) {
        s = make_state(pp, op, dilate(s.u, s.tau));
    }
    return s;
}

RadialFunction absolute(RadialFunction u) {
    for (double& v : u.mutable_values()) v = std::abs(v);
    return u;
}

double h1_sq(const RadialFunction& u) {
    const auto parts = h1_seminorms(u);
    return parts.kinetic + parts.mass;
}

// Gradient of phi_u(tau) with tau frozen at the fiber maximizer (envelope theorem).
std::vector<double> reduced_gradient(const ProblemParams& pp, const State& s) {
    const auto& d = pp.dims();
    const double n = d.n();
    const double tk = std::pow(s.tau, n - 2.0);
    const double tm = std::pow(s.tau, n);
    const double tc = std::pow(s.tau, n + d.alpha());
    auto grad = s.u.grid().apply_stiffness(s.u.values());
    const auto w = s.u.grid().weights();
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad[i] = tk * grad[i] + w[i] * (tm * pp.kappa() * s.u[i] - tc * s.ev.potential[i] * s.ev.source_grad[i]);
    }
    return grad;
}

Eigen::MatrixXd stiffness_matrix(const RadialGrid& g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    const auto m = g.cell_masses();
    for (std::size_t j = 0; j < g.cells(); ++j) {
        const double h = g.spacing(j);
        const double c = m[j] / (h * h);
        const auto a = static_cast<Eigen::Index>(j);
        k(a, a) += c;
        k(a + 1, a + 1) += c;
        k(a, a + 1) -= c;
        k(a + 1, a) -= c;
    }
    return k;
}

struct Kkt {
    Eigen::VectorXd grad_e;
    Eigen::VectorXd grad_p;
    double pohozaev = 0;
    double merit = 0;
};

Kkt kkt_residual(const ProblemParams& pp, const Eigen::MatrixXd& k, const State& s, double lambda) {
    const auto& d = pp.dims();
    const double n = d.n();
    const auto m = static_cast<Eigen::Index>(s.u.size());
    const auto w = s.u.grid().weights();
    Eigen::Map<const Eigen::VectorXd> u(s.u.values().data(), m);
    const Eigen::VectorXd ku = k * u;
    Kkt out;
    out.grad_e.resize(m);
    out.grad_p.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double mass = pp.kappa() * w[i] * u(i);
        const double nonlocal = w[i] * s.ev.potential[i] * s.ev.source_grad[i];
        out.grad_e(i) = ku(i) + mass - nonlocal;
        out.grad_p(i) = (n - 2.0) * ku(i) + n * mass - (n + d.alpha()) * nonlocal;
    }
    out.pohozaev = s.ev.breakdown.pohozaev;
    const Eigen::VectorXd r = out.grad_e + lambda * out.grad_p;
    out.merit = std::sqrt(r.squaredNorm() + out.pohozaev * out.pohozaev);
    return out;
}

// Newton on the Lagrange system grad E + lambda grad P = 0, P = 0.
struct NewtonResult {
    State state;
    int iterations = 0;
    bool ok = false;
};

NewtonResult constrained_newton(const ProblemParams& pp, const RieszOperator& op, State s, int max_iterations) {
    const auto& d = pp.dims();
    const double n = d.n();
    const double sum_exp = n + d.alpha();
    const RadialGrid& g = s.u.grid();
    const auto m = static_cast<Eigen::Index>(g.size());
    const auto w = g.weights();
    Eigen::Map<const Eigen::VectorXd> wv(w.data(), m);
    const Eigen::MatrixXd k = stiffness_matrix(g);
    const Eigen::MatrixXd& kernel = op.weighted();

    double lambda = 0.0;
    Kkt res = kkt_residual(pp, k, s, lambda);
    NewtonResult out{s, 0, false};
    for (int it = 0; it < max_iterations; ++it) {
        {
            std::vector<double> lagrangian(static_cast<std::size_t>(m));
            for (Eigen::Index i = 0; i < m; ++i) lagrangian[static_cast<std::size_t>(i)] = res.grad_e(i) + lambda * res.grad_p(i);
            if (el_residual(s.u, lagrangian) < 1e-8 && std::abs(res.pohozaev) < 1e-13 * h1_sq(s.u)) {
                out.ok = true;
                break;
            }
        }
        Eigen::VectorXd g1(m), dg(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            g1(i) = s.ev.source_grad[static_cast<std::size_t>(i)];
            dg(i) = pp.source_second_derivative(s.u[static_cast<std::size_t>(i)]);
        }
        Eigen::Map<const Eigen::VectorXd> pot(s.ev.potential.data(), m);
        // Hessian of the nonlocal half-energy.
        Eigen::MatrixXd c = (wv.cwiseProduct(g1)).asDiagonal() * kernel * g1.asDiagonal();
        c.diagonal() += wv.cwiseProduct(pot).cwiseProduct(dg);

        Eigen::MatrixXd a(m + 1, m + 1);
        a.topLeftCorner(m, m) = (1.0 + lambda * (n - 2.0)) * k - (1.0 + lambda * sum_exp) * c;
        a.topLeftCorner(m, m).diagonal() += (1.0 + lambda * n) * pp.kappa() * wv;
        a.block(0, m, m, 1) = res.grad_p;
        a.block(m, 0, 1, m) = res.grad_p.transpose();
        a(m, m) = 0.0;
        Eigen::VectorXd rhs(m + 1);
        rhs.head(m) = -(res.grad_e + lambda * res.grad_p);
        rhs(m) = -res.pohozaev;
        const Eigen::VectorXd delta = a.partialPivLu().solve(rhs);
        if (!delta.allFinite()) break;

        bool accepted = false;
        double t = 1.0;
        for (int ls = 0; ls < 12; ++ls, t *= 0.5) {
            std::vector<double> trial(s.u.values().begin(), s.u.values().end());
            for (Eigen::Index i = 0; i < m; ++i) trial[static_cast<std::size_t>(i)] += t * delta(i);
            State next{RadialFunction(s.u.grid_ptr(), std::move(trial)), {}, 1.0, 0.0};
            next.ev = evaluate(pp, op, next.u);
            const double next_lambda = lambda + t * delta(m);
            const Kkt next_res = kkt_residual(pp, k, next, next_lambda);
            if (next_res.merit < res.merit) {
                s = std::move(next);
                lambda = next_lambda;
                res = next_res;
                accepted = true;
                out.iterations = it + 1;
                break;
            }
        }
        if (!accepted) break;
    }
    s.tau = 1.0;
    s.projected = s.ev.breakdown.energy;
    out.state = std::move(s);
    out.ok = out.ok || out.iterations > 0;
    return out;
}

}  // namespace

void SolveOptions::validate() const {
    if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("shrink must lie in (0, 1)");
    if (!(el_tol > 0.0) || !(pohozaev_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (starts < 1) throw std::invalid_argument("starts must be >= 1");
    if (!(handover_tol > 0.0)) throw std::invalid_argument("handover_tol must be positive");
    if (newton_iterations < 0) throw std::invalid_argument("newton_iterations must be >= 0");
    if (!(projection_drift > 0.0)) throw std::invalid_argument("projection_drift must be positive");
}

RadialFunction initial_guess(GridPtr grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> width(0.6, 1.6);
    const double s = width(rng);
    auto u = RadialFunction::sample(std::move(grid), [s](double r) { return std::exp(-0.5 * r * r / (s * s)); });
    u *= 1.0 / lq_norm(u, 2.0);
    return u;
}

SolveReport minimize(const ProblemParams& pp, const RieszOperator& op, const RadialFunction& init, const SolveOptions& opts) {
    opts.validate();
    require_same_grid(op.grid(), init.grid());
    double peak = 0.0;
    for (double v : init.values()) peak = std::max(peak, std::abs(v));
    if (!(peak > 0.0)) throw std::invalid_argument("minimize: initial profile is zero");

    State s = reproject(pp, op, make_state(pp, op, absolute(init)));
    SolveReport rep(s.u);
    rep.seed = opts.seed;

    double step = opts.step;
    int it = 0;
    std::string status = "descent reached iteration limit";
    for (; it < opts.max_iterations; ++it) {
        const auto grad = reduced_gradient(pp, s);
        const auto dir = s.u.grid().solve_shifted(pp.kappa(), grad);
        double dot = 0.0;
        for (std::size_t i = 0; i < grad.size(); ++i) dot += dir[i] * grad[i];
        const double gnorm = std::sqrt(std::max(dot, 0.0) / h1_sq(s.u));
        if (gnorm < opts.handover_tol) {
            status = "descent handed over";
            break;
        }
        bool accepted = false;
        while (step > 1e-14) {
            std::vector<double> trial(s.u.size());
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = std::abs(s.u[i] - step * dir[i]);
            std::optional<State> next;
            try {
                next = make_state(pp, op, RadialFunction(s.u.grid_ptr(), std::move(trial)));
            } catch (const SolveError&) {
                // A trial that collapses or escapes the grid is simply too long a step.
            }
            if (next && next->projected <= s.projected) {
                rep.energy_log.push_back({s.projected, next->projected});
                s = std::move(*next);
                accepted = true;
                break;
            }
            step *= opts.shrink;
        }
        if (!accepted) {
            status = "descent stalled";
            break;
        }
        step = std::min(step * 1.3, 4.0 * opts.step);
        if (std::abs(s.tau - 1.0) > opts.projection_drift) s = reproject(pp, op, std::move(s));
    }
    rep.iterations = it;

    if (opts.newton_iterations > 0) {
        auto newton = constrained_newton(pp, op, reproject(pp, op, std::move(s)), opts.newton_iterations);
        rep.newton_iterations = newton.iterations;
        s = std::move(newton.state);
        if (!newton.ok) status += "; newton made no progress";
    } else {
        s = reproject(pp, op, std::move(s));
    }

    rep.profile = s.u;
    rep.status = status;
    rep = certify(pp, op, std::move(rep));
    rep.converged = rep.el_residual <= opts.el_tol && rep.pohozaev_residual <= opts.pohozaev_tol;
    if (!rep.converged) rep.status += "; tolerances not met";
    return rep;
}

MultistartReport multistart(const ProblemParams& pp, const RieszOperator& op, const SolveOptions& opts) {
    opts.validate();
    MultistartReport out{SolveReport(RadialFunction::zero(op.grid_ptr())), {}, {}, 0.0};
    bool have = false;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int k = 0; k < opts.starts; ++k) {
        SolveOptions o = opts;
        o.seed = opts.seed + static_cast<std::uint64_t>(k);
        auto rep = minimize(pp, op, initial_guess(op.grid_ptr(), o.seed), o);
        out.energies.push_back(rep.m_p);
        out.seeds.push_back(o.seed);
        if (rep.converged) {
            lo = std::min(lo, rep.m_p);
            hi = std::max(hi, rep.m_p);
        }
        const bool better = !have || (rep.converged && !out.best.converged) ||
                            (rep.converged == out.best.converged && rep.m_p < out.best.m_p);
        if (better) {
            out.best = std::move(rep);
            have = true;
        }
    }
    out.spread = hi >= lo ? (hi - lo) / lo : std::numeric_limits<double>::infinity();
    return out;
}

SolveReport certify(const ProblemParams& pp, const RieszOperator& op, SolveReport rep) {
    const RadialFunction& u = rep.profile;
    const auto ev = evaluate(pp, op, u);
    rep.breakdown = ev.breakdown;
    rep.m_p = ev.breakdown.energy;
    rep.el_residual = el_residual(u, energy_gradient(pp, u, ev));
    rep.pohozaev_residual = pohozaev_residual(ev.breakdown, u);
    rep.truncation = truncation_ratio(u);

    const auto r = u.grid().nodes();
    const std::size_t m = u.size();
    double peak = 0.0;
    for (double v : u.values()) peak = std::max(peak, std::abs(v));

    rep.positive = true;
    for (std::size_t i = 0; i + 1 < m; ++i) rep.positive = rep.positive && u[i] > 0.0;

    const double slack = 1e-9 * peak;
    rep.radially_nonincreasing = true;
    for (std::size_t i = 0; i + 1 < m; ++i) rep.radially_nonincreasing = rep.radially_nonincreasing && u[i + 1] <= u[i] + slack;

    const int n = pp.dims().n();
    const double l2 = lq_norm(u, 2.0);
    const double scale = std::sqrt(n / unit_sphere_area(n)) * l2;
    rep.decay_bound_ok = true;
    for (std::size_t i = 1; i < m; ++i) {
        const double bound = scale * std::pow(r[i], -0.5 * n);
        rep.decay_bound_ok = rep.decay_bound_ok && std::abs(u[i]) <= bound * (1.0 + 1e-12);
    }
    rep.below_threshold = rep.m_p < pp.constants().threshold;
    return rep;
}

ContinuationReport continuation(const ProblemParams& pp_template, const RieszOperator& op, const std::vector<double>& schedule,
                                const SolveOptions& opts) {
    if (schedule.empty()) throw std::invalid_argument("continuation: empty schedule");
    for (std::size_t k = 1; k < schedule.size(); ++k) {
        if (!(schedule[k] > schedule[k - 1])) throw std::invalid_argument("continuation: schedule must increase strictly");
    }
    std::vector<ProblemParams> problems;
    for (double p : schedule) problems.push_back(pp_template.with_p(p));

    ContinuationReport out;
    std::optional<RadialFunction> warm;
    for (const auto& pp : problems) {
        ContinuationEntry e;
        e.p = pp.p();
        try {
            const auto init = warm ? *warm : initial_guess(op.grid_ptr(), opts.seed);
            auto rep = minimize(pp, op, init, opts);
            e.m_p = rep.m_p;
            e.el_residual = rep.el_residual;
            e.pohozaev_residual = rep.pohozaev_residual;
            e.converged = rep.converged;
            e.breakdown = rep.breakdown;
            e.status = rep.status;
            warm = rep.profile;
            out.last = std::move(rep);
        } catch (const SolveError& err) {
            e.m_p = std::numeric_limits<double>::quiet_NaN();
            e.status = err.what();
        }
        out.p_values.push_back(e.p);
        out.m_values.push_back(e.m_p);
        out.entries.push_back(std::move(e));
    }
    out.limit_estimate = out.m_values.back();
    out.monotonicity_diagnostic = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < out.m_values.size(); ++k) {
        out.monotonicity_diagnostic = std::max(out.monotonicity_diagnostic, out.m_values[k] - out.m_values[k - 1]);
    }
    if (out.m_values.size() == 1) out.monotonicity_diagnostic = 0.0;
    if (problems.back().critical() && out.m_values.size() >= 3) {
        const std::size_t last = out.m_values.size() - 1;
        out.tail_ratio = std::max(out.m_values[last - 1], out.m_values[last - 2]) / out.m_values[last];
    }
    return out;
}

}  // namespace choquard
