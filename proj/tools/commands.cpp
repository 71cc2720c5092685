#include "commands.hpp"

#include "choquard/riesz.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace choquard::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string dat_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

void write_json(const fs::path& file, const json& j) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << j.dump(2) << '\n';
}

class Run {
public:
    Run(const std::string& name, const RunConfig& cfg) : name_(name), cfg_(cfg), dir_(cfg.output_dir), start_(std::chrono::steady_clock::now()) {
        fs::create_directories(dir_);
        fs::remove(dir_ / "FAILED");
    }

    const fs::path& dir() const { return dir_; }

    fs::path artifact(const std::string& file) {
        artifacts_.push_back(file);
        return dir_ / file;
    }

    void finish(int code, const std::string& message) {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json m;
        m["run_id"] = cfg_.run_id;
        m["subcommand"] = name_;
        m["config_hash"] = hex(config_hash(cfg_));
        m["versions"] = {{"choquard", kVersion}, {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
        m["exit_code"] = code;
        m["wall_clock_seconds"] = wall;
        m["artifacts"] = artifacts_;
        m["config"] = to_text(cfg_);
        write_json(dir_ / "manifest.json", m);
        if (code != kOk) {
            std::ofstream marker(dir_ / "FAILED");
            marker << "exit " << code << ": " << message << '\n';
        }
    }

private:
    std::string name_;
    RunConfig cfg_;
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> artifacts_;
};

RieszOperator make_operator(const RunConfig& cfg, const DimensionPair& d, GridPtr grid) {
    KernelOptions ko;
    ko.threads = cfg.threads;
    if (cfg.kernel_cache.empty()) return RieszOperator::build(d, std::move(grid), ko);
    fs::create_directories(cfg.kernel_cache);
    std::ostringstream name;
    name << "kernel-N" << d.n() << "-a" << std::setprecision(17) << d.alpha() << "-" << hex(grid->fingerprint()) << ".bin";
    return RieszOperator::cached(d, std::move(grid), fs::path(cfg.kernel_cache) / name.str(), ko);
}

int cmd_constants(const RunConfig& cfg, Run& run, std::ostream& out) {
    const DimensionPair d(cfg.n, cfg.alpha);
    const auto c = constants_report(d, cfg.mu);
    const json j = {{"N", cfg.n}, {"alpha", cfg.alpha}, {"mu", cfg.mu}, {"constants", to_json(c)}};
    write_json(run.artifact("constants.json"), j);
    out << j.dump(2) << '\n' << constants_table(c);
    return kOk;
}

int cmd_solve(const RunConfig& cfg, Run& run, std::ostream& out) {
    const auto pp = cfg.problem();
    auto grid = RadialGrid::make(pp.dims().n(), cfg.grid());
    const auto op = make_operator(cfg, pp.dims(), grid);
    const auto ms = multistart(pp, op, cfg.solver);
    json j = to_json(ms.best, pp);
    j["multistart"] = {{"seeds", ms.seeds}, {"energies", ms.energies}, {"relative_spread", std::isfinite(ms.spread) ? json(ms.spread) : json(nullptr)}};
    write_json(run.artifact("solve.json"), j);
    {
        std::ofstream csv(run.artifact("profile.csv"));
        write_profile_csv(csv, ms.best.profile);
    }
    run.artifact(emit_profile_dat(run.dir(), cfg.run_id, ms.best.profile).filename().string());
    out << "m_p = " << std::setprecision(12) << ms.best.m_p << "  el_residual = " << ms.best.el_residual
        << "  pohozaev_residual = " << ms.best.pohozaev_residual << "  converged = " << std::boolalpha << ms.best.converged << '\n';
    return ms.best.converged ? kOk : kNotConverged;
}

int cmd_continue(const RunConfig& cfg, Run& run, std::ostream& out) {
    const auto pp = cfg.problem();
    for (double p : cfg.schedule) (void)pp.with_p(p);  // validates the interval up front
    auto grid = RadialGrid::make(pp.dims().n(), cfg.grid());
    const auto op = make_operator(cfg, pp.dims(), grid);
    const auto rep = continuation(pp, op, cfg.schedule, cfg.solver);
    write_json(run.artifact("continuation.json"), to_json(rep));
    {
        std::ofstream csv(run.artifact("continuation.csv"));
        write_continuation_csv(csv, rep);
    }
    run.artifact(emit_continuation_dat(run.dir(), cfg.run_id, rep).filename().string());
    bool all = true;
    for (const auto& e : rep.entries) {
        out << "p = " << std::setw(8) << e.p << "  m_p = " << std::setprecision(12) << e.m_p << (e.converged ? "" : "  (not converged)") << '\n';
        all = all && e.converged;
    }
    return all ? kOk : kNotConverged;
}

int cmd_bubble(const RunConfig& cfg, Run& run, std::ostream& out) {
    const auto pp = cfg.problem();
    const auto& d = pp.dims();
    if (!pp.critical()) throw std::invalid_argument("bubble needs problem.p = p^* = " + std::to_string(d.upper_exponent()));
    double smallest = cfg.epsilons.front();
    for (double e : cfg.epsilons) smallest = std::min(smallest, e);
    auto grid = bubble_grid(d, smallest, cfg.bubble_cells);
    const auto op = make_operator(cfg, d, grid);
    const auto a = verify_asymptotics(d, cfg.epsilons, op);
    const auto s = threshold_strictness(pp, op, cfg.epsilons);
    const auto f = f_contribution_scaling(d, pp.nonlinearity(), cfg.epsilons, op);
    write_json(run.artifact("bubble.json"), to_json(a, s, f));
    {
        std::ofstream csv(run.artifact("bubble.csv"));
        write_bubble_csv(csv, a, s);
    }
    run.artifact(emit_bubble_dat(run.dir(), cfg.run_id, a, s).filename().string());
    out << "best sup_tau I = " << std::setprecision(10) << s.best_sup << "  threshold = " << s.threshold
        << "  strict = " << std::boolalpha << s.strict << '\n';
    return kOk;
}

int cmd_check(const RunConfig& cfg, Run& run, std::ostream& out) {
    if (cfg.profile.empty()) throw std::invalid_argument("check needs a profile CSV (check.profile or positional argument)");
    std::ifstream in(cfg.profile);
    if (!in) throw std::invalid_argument("cannot read profile " + cfg.profile);
    const auto pp = cfg.problem();
    const auto u = read_profile_csv(in, pp.dims().n());
    const auto op = make_operator(cfg, pp.dims(), u.grid_ptr());
    auto rep = certify(pp, op, SolveReport(u));
    rep.converged = rep.el_residual <= cfg.solver.el_tol && rep.pohozaev_residual <= cfg.solver.pohozaev_tol;
    rep.status = "re-certified from " + cfg.profile;
    json j = to_json(rep, pp);
    write_json(run.artifact("check.json"), j);
    out << j["flags"].dump() << '\n';
    const bool ok = rep.converged && rep.positive && rep.radially_nonincreasing && rep.decay_bound_ok;
    return ok ? kOk : kNotConverged;
}

int cmd_hls(const RunConfig& cfg, Run& run, std::ostream& out) {
    const DimensionPair d(cfg.n, cfg.alpha);
    GridSpec spec;
    spec.cells = cfg.hls_cells;
    spec.radius = cfg.hls_radius;
    spec.max_ratio = 1000.0;
    spec.growth = 1.01;
    auto grid = RadialGrid::make(d.n(), spec);
    const auto op = make_operator(cfg, d, grid);
    const double c_alpha = hls_sharp_constant(d);
    const double a_alpha = riesz_normalization(d);
    const double s = d.hls_exponent();
    const double t = 2.0 * d.n() / (d.n() - d.alpha());

    std::mt19937_64 rng(cfg.solver.seed);
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), centre(0.0, 4.0), width(0.2, 2.0);
    int violations = 0;
    int mapping_violations = 0;
    double worst = 0.0;
    double worst_mapping = 0.0;
    for (int k = 0; k < cfg.hls_samples; ++k) {
        struct Bump { double a, c, w; };
        std::vector<Bump> bumps(static_cast<std::size_t>(count(rng)));
        for (auto& b : bumps) b = {amp(rng), centre(rng), width(rng)};
        auto u = RadialFunction::sample(grid, [&](double r) {
            double v = 0.0;
            for (const auto& b : bumps) v += b.a * std::exp(-std::pow((r - b.c) / b.w, 2));
            return v;
        });
        if (lq_norm(u, s) == 0.0) continue;
        const double qv = hls_quotient(op, u);
        worst = std::max(worst, qv / c_alpha);
        if (qv > c_alpha) ++violations;
        const double lhs = lq_norm(op.apply(u), t);
        const double rhs = a_alpha * c_alpha * lq_norm(u, s);
        worst_mapping = std::max(worst_mapping, lhs / rhs);
        if (lhs > rhs) ++mapping_violations;
    }
    const auto opt = hls_optimizer_ratio(op);
    const double power = -0.5 * (d.n() + d.alpha());
    auto h = RadialFunction::sample(grid, [power](double r) { return std::pow(1.0 + r * r, power); });
    json dil = json::array();
    for (double tau : {0.5, 2.0}) dil.push_back({{"tau", tau}, {"ratio", hls_quotient(op, dilate(h, tau))}});

    json j;
    j["N"] = d.n();
    j["alpha"] = d.alpha();
    j["c_alpha"] = c_alpha;
    j["samples"] = cfg.hls_samples;
    j["violations"] = violations;
    j["max_quotient_over_c_alpha"] = worst;
    j["mapping_violations"] = mapping_violations;
    j["max_mapping_ratio"] = worst_mapping;
    j["optimizer"] = {{"ratio", opt.ratio}, {"relative_gap", (c_alpha - opt.ratio) / c_alpha}, {"tail_mass", opt.tail_mass}, {"dilated", dil}};
    write_json(run.artifact("hls.json"), j);
    out << j.dump(2) << '\n';
    return violations == 0 && mapping_violations == 0 ? kOk : kNotConverged;
}

}  // namespace

json to_json(const ConstantsReport& c) {
    return {{"a_alpha", c.a_alpha}, {"c_alpha", c.c_alpha}, {"sobolev_s", c.sobolev_s}, {"s_alpha", c.s_alpha}, {"threshold", c.threshold}};
}

json to_json(const EnergyBreakdown& eb) {
    return {{"kinetic", eb.kinetic}, {"mass", eb.mass}, {"nonlocal", eb.nonlocal}, {"energy", eb.energy}, {"pohozaev", eb.pohozaev}};
}

json to_json(const ProblemParams& pp) {
    return {{"N", pp.dims().n()}, {"alpha", pp.dims().alpha()}, {"kappa", pp.kappa()}, {"mu", pp.mu()}, {"p", pp.p()},
            {"nu", pp.nonlinearity().nu}, {"q", pp.nonlinearity().q}};
}

json to_json(const SolveReport& rep, const ProblemParams& pp) {
    const auto& g = rep.profile.grid();
    json j;
    j["parameters"] = to_json(pp);
    j["grid"] = {{"cells", g.cells()}, {"radius", g.radius()}, {"fingerprint", hex(g.fingerprint())}};
    j["breakdown"] = to_json(rep.breakdown);
    j["m_p"] = rep.m_p;
    j["threshold"] = pp.constants().threshold;
    j["residuals"] = {{"el", rep.el_residual}, {"pohozaev", rep.pohozaev_residual}, {"truncation", rep.truncation}};
    j["flags"] = {{"converged", rep.converged},
                  {"positive", rep.positive},
                  {"radially_nonincreasing", rep.radially_nonincreasing},
                  {"decay_bound_ok", rep.decay_bound_ok},
                  {"below_threshold", rep.below_threshold},
                  {"truncation_warning", rep.truncation > 1e-6}};
    j["iterations"] = {{"descent", rep.iterations}, {"newton", rep.newton_iterations}};
    j["seed"] = rep.seed;
    j["status"] = rep.status;
    return j;
}

json to_json(const ContinuationReport& rep) {
    json entries = json::array();
    for (const auto& e : rep.entries) {
        entries.push_back({{"p", e.p},
                           {"m_p", std::isfinite(e.m_p) ? json(e.m_p) : json(nullptr)},
                           {"el_residual", e.el_residual},
                           {"pohozaev_residual", e.pohozaev_residual},
                           {"converged", e.converged},
                           {"breakdown", to_json(e.breakdown)},
                           {"status", e.status}});
    }
    json j;
    j["entries"] = entries;
    j["limit_estimate"] = rep.limit_estimate;
    j["monotonicity_diagnostic"] = rep.monotonicity_diagnostic;
    j["tail_ratio"] = rep.tail_ratio ? json(*rep.tail_ratio) : json(nullptr);
    return j;
}

json to_json(const AsymptoticsReport& a, const StrictnessReport& s, const FContribution& f) {
    json j;
    j["epsilons"] = a.epsilons;
    j["asymptotics"] = {{"kinetic_limit", a.kinetic_limit},
                        {"nonlocal_limit", a.nonlocal_limit},
                        {"kinetic_order", a.kinetic_order},
                        {"mass_order", a.mass_order},
                        {"nonlocal_order", a.nonlocal_order},
                        {"sobolev_inequality_ok", a.sobolev_ok},
                        {"degenerate", a.degenerate},
                        {"note", a.note}};
    j["strictness"] = {{"sup_values", s.sup_values},
                       {"sup_values_without_f", s.sup_values_pure},
                       {"taus", s.taus},
                       {"best_sup", s.best_sup},
                       {"threshold", s.threshold},
                       {"strict", s.strict},
                       {"strict_at_two_smallest", s.strict_smallest_two},
                       {"tau_range", {s.tau_lo, s.tau_hi}}};
    if (f.no_f_term) {
        j["f_contribution"] = {{"note", "no F-term"}};
    } else {
        j["f_contribution"] = {{"pairing", f.pairing},
                               {"restricted_pairing", f.restricted_pairing},
                               {"order", f.order},
                               {"restricted_order", f.restricted_order},
                               {"reference_order", f.reference_order},
                               {"ok", f.ok}};
    }
    return j;
}

std::string constants_table(const ConstantsReport& c) {
    std::ostringstream os;
    os << std::setprecision(15);
    const std::pair<const char*, double> rows[] = {
        {"a_alpha", c.a_alpha}, {"c_alpha", c.c_alpha}, {"sobolev_s", c.sobolev_s}, {"s_alpha", c.s_alpha}, {"threshold", c.threshold}};
    for (const auto& [k, v] : rows) os << std::left << std::setw(12) << k << std::right << std::setw(22) << v << '\n';
    return os.str();
}

void write_continuation_csv(std::ostream& out, const ContinuationReport& rep) {
    out << "p,m_p,el_residual,pohozaev_residual,converged\n";
    for (const auto& e : rep.entries) {
        out << dat_number(e.p) << ',' << dat_number(e.m_p) << ',' << dat_number(e.el_residual) << ','
            << dat_number(e.pohozaev_residual) << ',' << (e.converged ? 1 : 0) << '\n';
    }
}

void write_bubble_csv(std::ostream& out, const AsymptoticsReport& a, const StrictnessReport& s) {
    out << "epsilon,kinetic,mass2,masscrit,nonlocal,supI\n";
    for (std::size_t k = 0; k < a.epsilons.size(); ++k) {
        out << dat_number(a.epsilons[k]) << ',' << dat_number(a.kinetic[k]) << ',' << dat_number(a.mass_values[k]) << ','
            << dat_number(a.critical_mass[k]) << ',' << dat_number(a.nonlocal_values[k]) << ',' << dat_number(s.sup_values[k]) << '\n';
    }
}

fs::path emit_profile_dat(const fs::path& dir, const std::string& run_id, const RadialFunction& u) {
    const auto file = dir / (run_id + ".profile.dat");
    std::ofstream out(file);
    out << "# r u\n";
    const auto r = u.grid().nodes();
    for (std::size_t i = 0; i < u.size(); ++i) out << dat_number(r[i]) << ' ' << dat_number(u[i]) << '\n';
    return file;
}

fs::path emit_continuation_dat(const fs::path& dir, const std::string& run_id, const ContinuationReport& rep) {
    const auto file = dir / (run_id + ".continuation.dat");
    std::vector<std::pair<double, double>> rows;
    for (const auto& e : rep.entries) rows.emplace_back(e.p, e.m_p);
    std::sort(rows.begin(), rows.end());
    std::ofstream out(file);
    out << "# p m_p\n";
    for (const auto& [p, m] : rows) out << dat_number(p) << ' ' << dat_number(m) << '\n';
    return file;
}

fs::path emit_bubble_dat(const fs::path& dir, const std::string& run_id, const AsymptoticsReport& a, const StrictnessReport& s) {
    const auto file = dir / (run_id + ".bubble.dat");
    std::ofstream out(file);
    out << "# epsilon kinetic_error mass2 supI threshold\n";
    for (std::size_t k = 0; k < a.epsilons.size(); ++k) {
        out << dat_number(a.epsilons[k]) << ' ' << dat_number(a.kinetic_errors[k]) << ' ' << dat_number(a.mass_values[k]) << ' '
            << dat_number(s.sup_values[k]) << ' ' << dat_number(s.threshold) << '\n';
    }
    return file;
}

int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    using Handler = int (*)(const RunConfig&, Run&, std::ostream&);
    const std::pair<const char*, Handler> table[] = {{"constants", cmd_constants}, {"solve", cmd_solve},   {"continue", cmd_continue},
                                                     {"bubble", cmd_bubble},       {"check", cmd_check},   {"hls-test", cmd_hls}};
    Handler handler = nullptr;
    for (const auto& [name, h] : table)
        if (subcommand == name) handler = h;
    if (!handler) {
        err << "unknown subcommand '" << subcommand << "'\n";
        return kInvalid;
    }
    std::optional<Run> r;
    try {
        r.emplace(subcommand, cfg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    }
    int code = kOk;
    std::string message;
    try {
        code = handler(cfg, *r, out);
        if (code != kOk) message = "checks did not pass";
    } catch (const SolveError& e) {
        code = kNotConverged;
        message = e.what();
    } catch (const std::invalid_argument& e) {
        code = kInvalid;
        message = e.what();
    } catch (const std::domain_error& e) {
        code = kInvalid;
        message = e.what();
    } catch (const std::exception& e) {
        code = kNotConverged;
        message = e.what();
    }
    if (!message.empty() && code != kOk) err << "error: " << message << '\n';
    r->finish(code, message);
    return code;
}

}  // namespace choquard::cli
