#pragma once

/// \file specfun.hpp
/// \brief Closed-form constants: Gamma, the Riesz normalization A_alpha(N),
///        the sharp conformal HLS constant, the Sobolev constant and the
///        critical Choquard energy threshold.

namespace choquard {

/// Spatial dimension N >= 3 together with the Riesz order alpha in (0, N).
class DimensionPair {
public:
    DimensionPair(int n, double alpha);

    int n() const { return n_; }
    double alpha() const { return alpha_; }

    /// Lower critical exponent (N + alpha) / N.
    double lower_exponent() const { return (n_ + alpha_) / n_; }
    /// Upper critical exponent (N + alpha) / (N - 2).
    double upper_exponent() const { return (n_ + alpha_) / (n_ - 2); }
    /// Conformal HLS exponent 2N / (N + alpha).
    double hls_exponent() const { return 2.0 * n_ / (n_ + alpha_); }
    /// Critical Sobolev exponent 2N / (N - 2).
    double sobolev_exponent() const { return 2.0 * n_ / (n_ - 2); }

    friend bool operator==(const DimensionPair&, const DimensionPair&) = default;

private:
    int n_;
    double alpha_;
};

/// Gamma function for x > 0. Throws std::domain_error otherwise.
double gamma(double x);

/// Surface area |S^{n-1}| of the unit sphere in R^n (n >= 1).
double unit_sphere_area(int n);

/// A_alpha(N) = Gamma((N-alpha)/2) / (Gamma(alpha/2) pi^{N/2} 2^alpha).
double riesz_normalization(const DimensionPair& d);

/// Sharp HLS constant C_alpha(N) for the conformal exponent 2N/(N+alpha).
double hls_sharp_constant(const DimensionPair& d);

/// Best Sobolev constant S for D^{1,2}(R^N) into L^{2N/(N-2)}.
double sobolev_constant(int n);

/// S_alpha = S / (A_alpha C_alpha)^{(N-2)/(N+alpha)}.
double critical_sobolev_constant(const DimensionPair& d);

/// Upper bound for the critical groundstate level,
/// (2+a)/(2(N+a)) ((N-2)/(N+a))^{(N-2)/(2+a)} mu^{-2(N-2)/(2+a)} S_alpha^{(N+a)/(2+a)}.
double critical_level_threshold(const DimensionPair& d, double mu);

struct ConstantsReport {
    double a_alpha = 0;
    double c_alpha = 0;
    double sobolev_s = 0;
    double s_alpha = 0;
    double threshold = 0;
};

ConstantsReport constants_report(const DimensionPair& d, double mu);

}  // namespace choquard
