#include "choquard/specfun.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace choquard {

DimensionPair::DimensionPair(int n, double alpha) : n_(n), alpha_(alpha) {
    if (n < 3) {
        std::ostringstream msg;
        msg << "dimension N must be >= 3, got " << n;
        throw std::domain_error(msg.str());
    }
    if (!(alpha > 0.0 && alpha < n)) {
        std::ostringstream msg;
        msg << "Riesz order alpha must lie in (0, " << n << "), got " << alpha;
        throw std::domain_error(msg.str());
    }
}

double gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "gamma: argument must be positive and finite, got " << x;
        throw std::domain_error(msg.str());
    }
    return std::tgamma(x);
}

double unit_sphere_area(int n) {
    if (n < 1) throw std::domain_error("unit_sphere_area: n must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma(0.5 * n);
}

double riesz_normalization(const DimensionPair& d) {
    const double n = d.n();
    const double a = d.alpha();
    return gamma(0.5 * (n - a)) / (gamma(0.5 * a) * std::pow(std::numbers::pi, 0.5 * n) * std::pow(2.0, a));
}

double hls_sharp_constant(const DimensionPair& d) {
    const double n = d.n();
    const double a = d.alpha();
    return std::pow(std::numbers::pi, 0.5 * (n - a)) * gamma(0.5 * a) / gamma(0.5 * (n + a)) *
           std::pow(gamma(0.5 * n) / gamma(n), -a / n);
}

double sobolev_constant(int n) {
    if (n < 3) throw std::domain_error("sobolev_constant: N must be >= 3");
    const double nn = n;
    return std::numbers::pi * nn * (nn - 2.0) * std::pow(gamma(0.5 * nn) / gamma(nn), 2.0 / nn);
}

double critical_sobolev_constant(const DimensionPair& d) {
    const double n = d.n();
    const double a = d.alpha();
    const double ac = riesz_normalization(d) * hls_sharp_constant(d);
    return sobolev_constant(d.n()) / std::pow(ac, (n - 2.0) / (n + a));
}

double critical_level_threshold(const DimensionPair& d, double mu) {
    if (!(mu > 0.0)) throw std::domain_error("critical_level_threshold: mu must be positive");
    const double n = d.n();
    const double a = d.alpha();
    const double s_alpha = critical_sobolev_constant(d);
    return (2.0 + a) / (2.0 * (n + a)) * std::pow((n - 2.0) / (n + a), (n - 2.0) / (2.0 + a)) *
           std::pow(mu, -2.0 * (n - 2.0) / (2.0 + a)) * std::pow(s_alpha, (n + a) / (2.0 + a));
}

ConstantsReport constants_report(const DimensionPair& d, double mu) {
    ConstantsReport rep;
    rep.a_alpha = riesz_normalization(d);
    rep.c_alpha = hls_sharp_constant(d);
    rep.sobolev_s = sobolev_constant(d.n());
    rep.s_alpha = critical_sobolev_constant(d);
    rep.threshold = critical_level_threshold(d, mu);
    return rep;
}

}  // namespace choquard
