#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace choquard::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto s = trim(v);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
    Int out = 0;
    const auto s = trim(v);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
    return out;
}

std::string num(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += num(xs[i]);
    }
    return out;
}

struct Field {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define CHQ_DOUBLE(member) \
    Field { [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_double(k, v); }, [](const RunConfig& c) { return num(c.member); } }
#define CHQ_INT(member, type)                                                                                  \
    Field {                                                                                                   \
        [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_int<type>(k, v); },      \
            [](const RunConfig& c) { return std::to_string(c.member); }                                       \
    }
#define CHQ_LIST(member) \
    Field { [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_list(k, v); }, [](const RunConfig& c) { return list(c.member); } }
#define CHQ_STRING(member) \
    Field { [](RunConfig& c, const std::string&, const std::string& v) { c.member = trim(v); }, [](const RunConfig& c) { return c.member; } }

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"problem.N", CHQ_INT(n, int)},
        {"problem.alpha", CHQ_DOUBLE(alpha)},
        {"problem.kappa", CHQ_DOUBLE(kappa)},
        {"problem.mu", CHQ_DOUBLE(mu)},
        {"problem.p", CHQ_DOUBLE(p)},
        {"problem.nu", CHQ_DOUBLE(nu)},
        {"problem.q", CHQ_DOUBLE(q)},
        {"grid.cells", CHQ_INT(cells, std::size_t)},
        {"grid.radius", CHQ_DOUBLE(radius)},
        {"grid.max_ratio", CHQ_DOUBLE(max_ratio)},
        {"grid.growth", CHQ_DOUBLE(growth)},
        {"solver.max_iterations", CHQ_INT(solver.max_iterations, int)},
        {"solver.step", CHQ_DOUBLE(solver.step)},
        {"solver.shrink", CHQ_DOUBLE(solver.shrink)},
        {"solver.el_tol", CHQ_DOUBLE(solver.el_tol)},
        {"solver.pohozaev_tol", CHQ_DOUBLE(solver.pohozaev_tol)},
        {"solver.seed", CHQ_INT(solver.seed, std::uint64_t)},
        {"solver.starts", CHQ_INT(solver.starts, int)},
        {"solver.handover_tol", CHQ_DOUBLE(solver.handover_tol)},
        {"solver.newton_iterations", CHQ_INT(solver.newton_iterations, int)},
        {"solver.projection_drift", CHQ_DOUBLE(solver.projection_drift)},
        {"continuation.schedule", CHQ_LIST(schedule)},
        {"bubble.epsilons", CHQ_LIST(epsilons)},
        {"bubble.cells", CHQ_INT(bubble_cells, std::size_t)},
        {"hls.samples", CHQ_INT(hls_samples, int)},
        {"hls.cells", CHQ_INT(hls_cells, std::size_t)},
        {"hls.radius", CHQ_DOUBLE(hls_radius)},
        {"check.profile", CHQ_STRING(profile)},
        {"output.dir", CHQ_STRING(output_dir)},
        {"output.run_id", CHQ_STRING(run_id)},
        {"kernel.cache", CHQ_STRING(kernel_cache)},
        {"run.threads", CHQ_INT(threads, unsigned)},
    };
    return table;
}

#undef CHQ_DOUBLE
#undef CHQ_INT
#undef CHQ_LIST
#undef CHQ_STRING

const Field& field(const std::string& key) {
    for (const auto& [name, f] : fields())
        if (name == key) return f;
    throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

ProblemParams RunConfig::problem() const { return {DimensionPair(n, alpha), kappa, mu, p, PowerNonlinearity{nu, q}}; }

GridSpec RunConfig::grid() const {
    GridSpec g;
    g.cells = cells;
    g.radius = radius;
    g.max_ratio = max_ratio;
    g.growth = growth;
    return g;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [name, f] : fields()) out.push_back(name);
        return out;
    }();
    return keys;
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& value) { field(key).set(cfg, key, value); }

std::string get_value(const RunConfig& cfg, const std::string& key) { return field(key).get(cfg); }

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected `key = value`");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        try {
            set_value(cfg, key, line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read configuration file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const RunConfig& cfg) {
    std::string out;
    for (const auto& [name, f] : fields()) out += name + " = " + f.get(cfg) + "\n";
    return out;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& args) {
    for (const auto& raw : args) {
        std::string arg = raw;
        while (!arg.empty() && arg.front() == '-') arg.erase(arg.begin());
        const auto eq = arg.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + raw + "' must look like --key=value");
        set_value(cfg, arg.substr(0, eq), arg.substr(eq + 1));
    }
}

std::uint64_t config_hash(const RunConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : to_text(cfg)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace choquard::cli
