#include "choquard/riesz.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace choquard {

namespace {

using boost::math::quadrature::gauss;

double int_pow(double x, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= x;
    return out;
}

// int_0^pi (delta^2 + 4 sin^2(t/2))^beta sin^{N-2} t dt. The integrand varies on
// the scale delta near t = 0, so panels double from width delta up to pi.
double angular_integral(int n, double beta, double delta) {
    auto f = [n, beta, delta](double t) {
        const double h = std::sin(0.5 * t);
        return std::pow(delta * delta + 4.0 * h * h, beta) * int_pow(std::sin(t), n - 2);
    };
    const double pi = std::numbers::pi;
    double lo = 0.0;
    double hi = std::min(std::max(delta, 1e-300), pi);
    double sum = 0.0;
    while (true) {
        sum += gauss<double, 16>::integrate(f, lo, hi);
        if (hi >= pi) break;
        lo = hi;
        hi = std::min(2.0 * hi, pi);
    }
    return sum;
}

struct KernelConstants {
    explicit KernelConstants(const DimensionPair& d)
        : n(d.n()),
          alpha(d.alpha()),
          beta(0.5 * (d.alpha() - d.n())),
          origin(riesz_normalization(d) * unit_sphere_area(d.n())),
          angular(riesz_normalization(d) * unit_sphere_area(d.n() - 1)) {}

    double operator()(double r, double s) const {
        const double outer = std::max(r, s);
        const double inner = std::min(r, s);
        if (!(outer > 0.0) || r == s || inner < 0.0) throw std::domain_error("radial_kernel: need r, s >= 0 with r != s");
        if (inner == 0.0) return origin * std::pow(outer, alpha - n);
        const double rs = r * s;
        const double delta = std::abs(r - s) / std::sqrt(rs);
        return angular * std::pow(rs, beta) * angular_integral(n, beta, delta);
    }

    int n;
    double alpha;
    double beta;
    double origin;
    double angular;
};

// int over [lo, hi] of k(r, s) s^{N-1} ds, where the integrand is singular (or has a
// cusp) at s = r, which is an endpoint. Panels halve toward r; the innermost piece
// follows the local power law s^{gamma-1}, gamma = min(alpha, 1).
double self_cell_side(const KernelConstants& k, double r, double far, int depth) {
    const double len = far - r;
    if (len == 0.0) return 0.0;
    auto f = [&](double s) { return k(r, s) * int_pow(s, k.n - 1); };
    const double gamma = std::min(k.alpha, 1.0);
    double sum = 0.0;
    double prev = 0.0;
    double last = 0.0;
    for (int k = 0; k < depth; ++k) {
        const double a = r + len * std::ldexp(1.0, -k - 1);
        const double b = r + len * std::ldexp(1.0, -k);
        prev = last;
        last = gauss<double, 8>::integrate(f, std::min(a, b), std::max(a, b));
        sum += last;
    }
    const double expected = std::pow(2.0, gamma);
    const double observed = prev / last;
    if (!std::isfinite(sum) || !(observed > 0.75 * expected && observed < 1.33 * expected)) {
        std::ostringstream msg;
        msg << "diagonal self-cell quadrature at r = " << r << " does not follow the expected power law (ratio "
            << observed << ", expected " << expected << ")";
        throw std::runtime_error(msg.str());
    }
    return sum + last / (expected - 1.0);
}

constexpr char kMagic[8] = {'C', 'H', 'Q', 'K', 'E', 'R', 'N', '1'};

template <class T>
void put(std::ostream& out, T v) {
    static_assert(std::endian::native == std::endian::little, "kernel cache assumes little-endian hosts");
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& in, T& v) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

}  // namespace

double radial_kernel(const DimensionPair& d, double r, double s) { return KernelConstants(d)(r, s); }

RieszOperator RieszOperator::build(const DimensionPair& d, GridPtr grid, const KernelOptions& opts) {
    if (!grid) throw std::invalid_argument("RieszOperator::build: null grid");
    const RadialGrid& g = *grid;
    const std::size_t m = g.size();
    const auto r = g.nodes();
    const auto w = g.weights();
    const double area = unit_sphere_area(d.n());
    const KernelConstants kernel(d);
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));

    auto fill_row = [&](std::size_t i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t j = i + 1; j < m; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const double k = kernel(r[i], r[j]) / area;
            mat(ii, jj) = k * w[j];
            mat(jj, ii) = k * w[i];
        }
        if (i == 0) {
            const double half = 0.5 * g.spacing(0);
            mat(0, 0) = riesz_normalization(d) * area * std::pow(half, d.alpha()) / d.alpha();
        } else {
            const auto [lo, hi] = g.dual_cell(i);
            const double left = self_cell_side(kernel, r[i], lo, opts.self_cell_depth);
            const double right = self_cell_side(kernel, r[i], hi, opts.self_cell_depth);
            mat(ii, ii) = left + right;
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(m)));
    if (threads == 1) {
        for (std::size_t i = 0; i < m; ++i) fill_row(i);
    } else {
        // Interleaved rows balance the triangular workload; every thread writes distinct entries.
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < threads; ++t) {
                pool.emplace_back([&, t] {
                    try {
                        for (std::size_t i = t; i < m; i += threads) fill_row(i);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return RieszOperator(d, std::move(grid), std::move(mat));
}

void RieszOperator::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write kernel cache " + file.string());
    const auto m = static_cast<std::uint64_t>(grid_->size());
    out.write(kMagic, sizeof kMagic);
    put(out, static_cast<double>(d_.n()));
    put(out, d_.alpha());
    put(out, static_cast<double>(m));
    put(out, grid_->radius());
    put(out, m);
    put(out, grid_->fingerprint());
    for (Eigen::Index i = 0; i < w_.rows(); ++i)
        for (Eigen::Index j = 0; j < w_.cols(); ++j) put(out, w_(i, j));
    if (!out) throw std::runtime_error("failed writing kernel cache " + file.string());
}

RieszOperator RieszOperator::cached(const DimensionPair& d, GridPtr grid, const std::filesystem::path& file,
                                    const KernelOptions& opts) {
    std::ifstream in(file, std::ios::binary);
    if (in) {
        char magic[8];
        double n = 0, alpha = 0, mdouble = 0, radius = 0;
        std::uint64_t m = 0, hash = 0;
        const bool header = in.read(magic, sizeof magic) && std::equal(magic, magic + 8, kMagic) && get(in, n) &&
                            get(in, alpha) && get(in, mdouble) && get(in, radius) && get(in, m) && get(in, hash);
        if (header && n == d.n() && alpha == d.alpha() && m == grid->size() && hash == grid->fingerprint()) {
            Eigen::MatrixXd mat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
            bool ok = true;
            for (Eigen::Index i = 0; ok && i < mat.rows(); ++i)
                for (Eigen::Index j = 0; ok && j < mat.cols(); ++j) ok = get(in, mat(i, j));
            if (ok) return RieszOperator(d, std::move(grid), std::move(mat));
        }
    }
    auto op = build(d, std::move(grid), opts);
    op.save(file);
    return op;
}

RadialFunction RieszOperator::apply(const RadialFunction& v) const {
    require_same_grid(*grid_, v.grid());
    return RadialFunction(grid_, apply(v.values()));
}

std::vector<double> RieszOperator::apply(std::span<const double> v) const {
    if (v.size() != grid_->size()) throw std::invalid_argument("RieszOperator::apply: length mismatch");
    std::vector<double> out(v.size());
    Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
    Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(out.size()));
    y.noalias() = w_ * x;
    return out;
}

double RieszOperator::pairing(const RadialFunction& u, const RadialFunction& v) const {
    require_same_grid(*grid_, u.grid());
    require_same_grid(*grid_, v.grid());
    const auto iv = apply(v.values());
    const auto w = grid_->weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < iv.size(); ++i) sum += w[i] * u[i] * iv[i];
    return sum;
}

double hls_quotient(const RieszOperator& op, const RadialFunction& u) {
    const auto& d = op.dims();
    const double norm = lq_norm(u, d.hls_exponent());
    if (norm == 0.0) throw std::invalid_argument("hls_quotient: zero function");
    return op.pairing(u, u) / riesz_normalization(d) / (norm * norm);
}

OptimizerRatio hls_optimizer_ratio(const RieszOperator& op, double max_tail) {
    const auto& d = op.dims();
    const double n = d.n();
    const double power = -0.5 * (n + d.alpha());
    auto h = RadialFunction::sample(op.grid_ptr(), [power](double r) { return std::pow(1.0 + r * r, power); });
    // h^{2N/(N+alpha)} = (1 + r^2)^{-N}; its radial integral is B(N/2, N/2)/2 and the
    // part beyond R is below R^{-N}/N.
    const double total = 0.5 * boost::math::beta(0.5 * n, 0.5 * n);
    OptimizerRatio out;
    out.tail_mass = std::pow(op.grid().radius(), -n) / n / total;
    if (out.tail_mass > max_tail) {
        std::ostringstream msg;
        msg << "grid radius " << op.grid().radius() << " truncates " << out.tail_mass
            << " of the HLS optimizer mass (limit " << max_tail << ")";
        throw std::runtime_error(msg.str());
    }
    out.ratio = hls_quotient(op, h);
    return out;
}

}  // namespace choquard
