#include "choquard/grid.hpp"

#include "choquard/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace choquard {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<double> graded_nodes(const GridSpec& spec) {
    const std::size_t m = spec.cells;
    std::size_t geometric = 0;
    if (spec.max_ratio > 1.0) {
        if (!(spec.growth > 1.0)) throw std::invalid_argument("grid growth factor must exceed 1 when max_ratio > 1");
        geometric = static_cast<std::size_t>(std::lround(std::log(spec.max_ratio) / std::log(spec.growth)));
        geometric = std::min(geometric, m - 1);
    }
    std::vector<double> h(m);
    for (std::size_t k = 0; k < m; ++k) h[k] = std::pow(spec.growth > 1.0 ? spec.growth : 1.0, static_cast<double>(std::min(k, geometric)));
    double total = 0;
    for (double x : h) total += x;
    std::vector<double> nodes(m + 1, 0.0);
    double acc = 0;
    for (std::size_t k = 0; k < m; ++k) {
        acc += h[k];
        nodes[k + 1] = spec.radius * acc / total;
    }
    nodes[m] = spec.radius;
    return nodes;
}

// Moves the node nearest to each pin onto the pin, stretching the segments
// between consecutive anchors affinely.
void apply_pins(std::vector<double>& nodes, std::vector<double> pins) {
    if (pins.empty()) return;
    std::sort(pins.begin(), pins.end());
    const double radius = nodes.back();
    std::vector<std::pair<std::size_t, double>> anchors{{0, 0.0}};
    for (double p : pins) {
        if (!(p > 0.0 && p < radius)) throw std::invalid_argument("grid pin outside (0, R)");
        auto it = std::lower_bound(nodes.begin(), nodes.end(), p);
        std::size_t k = static_cast<std::size_t>(it - nodes.begin());
        if (k > 0 && (k == nodes.size() || p - nodes[k - 1] < nodes[k] - p)) --k;
        k = std::clamp<std::size_t>(k, 1, nodes.size() - 2);
        if (k <= anchors.back().first) throw std::invalid_argument("grid pins closer than one cell");
        anchors.emplace_back(k, p);
    }
    anchors.emplace_back(nodes.size() - 1, radius);
    const std::vector<double> old = nodes;
    for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
        const auto [i0, t0] = anchors[a];
        const auto [i1, t1] = anchors[a + 1];
        const double s0 = old[i0];
        const double s1 = old[i1];
        for (std::size_t i = i0; i <= i1; ++i) nodes[i] = t0 + (old[i] - s0) * (t1 - t0) / (s1 - s0);
    }
}

}  // namespace

RadialGrid::RadialGrid(int dimension, std::vector<double> nodes) : dim_(dimension), nodes_(std::move(nodes)) {
    if (dim_ < 3) throw std::domain_error("radial grid dimension must be >= 3");
    if (nodes_.size() < 3) throw std::invalid_argument("radial grid needs at least two cells");
    if (nodes_.front() != 0.0) throw std::invalid_argument("radial grid must start at r = 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i]))
            throw std::invalid_argument("radial grid nodes must be finite and strictly increasing");
    }

    const double area = unit_sphere_area(dim_);
    const std::size_t m = cells();
    cell_masses_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        cell_masses_[j] = area * (std::pow(nodes_[j + 1], dim_) - std::pow(nodes_[j], dim_)) / dim_;
    }

    std::vector<double> coef(size(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const double h = spacing(j);
        coef[j] += 0.5 * h;
        coef[j + 1] += 0.5 * h;
    }
    if (m >= 6) {
        const double h = spacing(m - 1);
        const bool uniform_tail = std::abs(spacing(m - 2) - h) <= 1e-9 * h && std::abs(spacing(m - 3) - h) <= 1e-9 * h;
        if (uniform_tail) {
            coef[m] = 3.0 / 8.0 * h;
            coef[m - 1] = 7.0 / 6.0 * h;
            coef[m - 2] = 23.0 / 24.0 * h;
        }
    }
    weights_.resize(size());
    for (std::size_t i = 0; i < size(); ++i) weights_[i] = area * std::pow(nodes_[i], dim_ - 1) * coef[i];

    std::uint64_t h = 1469598103934665603ULL;
    h = fnv1a(h, &dim_, sizeof dim_);
    h = fnv1a(h, nodes_.data(), nodes_.size() * sizeof(double));
    fingerprint_ = h;
}

GridPtr RadialGrid::make(int dimension, const GridSpec& spec) {
    if (spec.cells < 256) throw std::invalid_argument("radial grid needs at least 256 cells");
    if (!(spec.radius > 0.0)) throw std::invalid_argument("grid radius must be positive");
    auto nodes = graded_nodes(spec);
    apply_pins(nodes, spec.pins);
    return GridPtr(new RadialGrid(dimension, std::move(nodes)));
}

GridPtr RadialGrid::uniform(int dimension, std::size_t cells, double radius) {
    GridSpec spec;
    spec.cells = cells;
    spec.radius = radius;
    spec.max_ratio = 1.0;
    return make(dimension, spec);
}

GridPtr RadialGrid::from_nodes(int dimension, std::vector<double> nodes) {
    return GridPtr(new RadialGrid(dimension, std::move(nodes)));
}

std::pair<double, double> RadialGrid::dual_cell(std::size_t i) const {
    const double lo = i == 0 ? 0.0 : nodes_[i] - 0.5 * spacing(i - 1);
    const double hi = i + 1 == size() ? nodes_[i] : nodes_[i] + 0.5 * spacing(i);
    return {lo, hi};
}

std::size_t RadialGrid::lower_index(double r) const {
    return static_cast<std::size_t>(std::lower_bound(nodes_.begin(), nodes_.end(), r) - nodes_.begin());
}

std::vector<double> RadialGrid::apply_stiffness(std::span<const double> u) const {
    std::vector<double> out(size(), 0.0);
    for (std::size_t j = 0; j < cells(); ++j) {
        const double h = spacing(j);
        const double c = cell_masses_[j] / (h * h);
        const double flux = c * (u[j + 1] - u[j]);
        out[j] -= flux;
        out[j + 1] += flux;
    }
    return out;
}

std::vector<double> RadialGrid::solve_shifted(double kappa, std::span<const double> rhs) const {
    const std::size_t n = size();
    std::vector<double> diag(n), upper(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) diag[i] = kappa * weights_[i];
    for (std::size_t j = 0; j < cells(); ++j) {
        const double h = spacing(j);
        const double c = cell_masses_[j] / (h * h);
        diag[j] += c;
        diag[j + 1] += c;
        upper[j] = -c;
    }
    // Thomas algorithm; the matrix is symmetric positive definite for kappa > 0.
    std::vector<double> cprime(n), x(rhs.begin(), rhs.end());
    double denom = diag[0];
    cprime[0] = upper[0] / denom;
    x[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - upper[i - 1] * cprime[i - 1];
        cprime[i] = upper[i] / denom;
        x[i] = (x[i] - upper[i - 1] * x[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cprime[i] * x[i + 1];
    return x;
}

std::vector<double> RadialGrid::negative_laplacian(std::span<const double> u) const {
    auto out = apply_stiffness(u);
    for (std::size_t i = 0; i < size(); ++i) out[i] = weights_[i] > 0.0 ? out[i] / weights_[i] : 0.0;
    return out;
}

bool operator==(const RadialGrid& a, const RadialGrid& b) {
    if (&a == &b) return true;
    return a.dimension() == b.dimension() && a.fingerprint() == b.fingerprint() &&
           std::equal(a.nodes().begin(), a.nodes().end(), b.nodes().begin(), b.nodes().end());
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b) {
    if (!(a == b)) throw std::invalid_argument("radial functions live on different grids");
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("radial function without grid");
    if (values_.size() != grid_->size()) throw std::invalid_argument("radial function length does not match grid");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("radial function has non-finite samples");
    }
}

RadialFunction RadialFunction::zero(GridPtr grid) {
    const std::size_t n = grid->size();
    return RadialFunction(std::move(grid), std::vector<double>(n, 0.0));
}

RadialFunction RadialFunction::sample(GridPtr grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
    return RadialFunction(std::move(grid), std::move(v));
}

RadialFunction& RadialFunction::operator+=(const RadialFunction& other) {
    require_same_grid(*grid_, other.grid());
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

RadialFunction& RadialFunction::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

RadialFunction operator+(RadialFunction a, const RadialFunction& b) { return a += b; }
RadialFunction operator*(double s, RadialFunction a) { return a *= s; }

double integrate(const RadialFunction& u) {
    const auto w = u.grid().weights();
    double sum = 0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * u[i];
    return sum;
}

H1Parts h1_seminorms(const RadialFunction& u) {
    const RadialGrid& g = u.grid();
    const auto m = g.cell_masses();
    const auto w = g.weights();
    H1Parts out;
    for (std::size_t j = 0; j < g.cells(); ++j) {
        const double du = (u[j + 1] - u[j]) / g.spacing(j);
        out.kinetic += m[j] * du * du;
    }
    for (std::size_t i = 0; i < u.size(); ++i) out.mass += w[i] * u[i] * u[i];
    return out;
}

double h1_norm(const RadialFunction& u) {
    const auto parts = h1_seminorms(u);
    return std::sqrt(parts.kinetic + parts.mass);
}

double lq_norm(const RadialFunction& u, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("lq_norm requires q >= 1");
    const auto w = u.grid().weights();
    double sum = 0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * std::pow(std::abs(u[i]), q);
    return std::pow(sum, 1.0 / q);
}

RadialFunction dilate(const RadialFunction& u, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("dilation factor must be positive");
    const RadialGrid& g = u.grid();
    const auto r = g.nodes();
    std::vector<double> out(u.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = r[i] / tau;
        if (x > g.radius()) continue;
        std::size_t k = g.lower_index(x);
        if (k == 0) {
            out[i] = u[0];
            continue;
        }
        if (k >= g.size()) k = g.size() - 1;
        const double t = (x - r[k - 1]) / (r[k] - r[k - 1]);
        out[i] = (1.0 - t) * u[k - 1] + t * u[k];
    }
    return RadialFunction(u.grid_ptr(), std::move(out));
}

double truncation_ratio(const RadialFunction& u) {
    double peak = 0;
    for (double v : u.values()) peak = std::max(peak, std::abs(v));
    return peak > 0.0 ? std::abs(u.values().back()) / peak : 0.0;
}

void write_profile_csv(std::ostream& out, const RadialFunction& u) {
    out << "r,u\n";
    char line[96];
    const auto r = u.grid().nodes();
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::snprintf(line, sizeof line, "%.16e,%.16e\n", r[i], u[i]);
        out << line;
    }
}

RadialFunction read_profile_csv(std::istream& in, int dimension) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("profile CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "r,u") throw std::invalid_argument("profile CSV header must be `r,u`");
    std::vector<double> r, u;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("profile CSV line " + std::to_string(lineno) + ": expected two columns");
        try {
            std::size_t used = 0;
            const std::string rs = line.substr(0, comma);
            const std::string us = line.substr(comma + 1);
            r.push_back(std::stod(rs, &used));
            if (used != rs.size()) throw std::invalid_argument("trailing characters");
            u.push_back(std::stod(us, &used));
            if (used != us.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::invalid_argument("profile CSV line " + std::to_string(lineno) + ": malformed number");
        }
        if (r.size() > 1 && !(r.back() > r[r.size() - 2]))
            throw std::invalid_argument("profile CSV line " + std::to_string(lineno) + ": radii must increase strictly");
    }
    auto grid = RadialGrid::from_nodes(dimension, std::move(r));
    return RadialFunction(std::move(grid), std::move(u));
}

}  // namespace choquard
