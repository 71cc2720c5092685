#include "choquard/specfun.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <numbers>
#include <random>

using namespace choquard;
using testing::rel;

TEST_SUITE("specfun") {

TEST_CASE("dimension pair exponents") {
    const DimensionPair d(3, 2.0);
    CHECK(d.lower_exponent() == doctest::Approx(5.0 / 3.0));
    CHECK(d.upper_exponent() == doctest::Approx(5.0));
    CHECK(d.hls_exponent() == doctest::Approx(1.2));
    CHECK(d.sobolev_exponent() == doctest::Approx(6.0));
    CHECK_THROWS_AS(DimensionPair(2, 1.0), std::domain_error);
    CHECK_THROWS_AS(DimensionPair(3, 0.0), std::domain_error);
    CHECK_THROWS_AS(DimensionPair(3, 3.0), std::domain_error);
}

TEST_CASE("gamma recursion on random arguments") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> x(0.1, 20.0);
    for (int k = 0; k < 100; ++k) {
        const double v = x(rng);
        CHECK(rel(choquard::gamma(v + 1.0), v * choquard::gamma(v)) < 1e-11);
    }
    CHECK(choquard::gamma(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-15));
    CHECK_THROWS_AS(choquard::gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(choquard::gamma(-1.5), std::domain_error);
}

TEST_CASE("unit sphere areas") {
    CHECK(rel(unit_sphere_area(2), 2.0 * std::numbers::pi) < 1e-15);
    CHECK(rel(unit_sphere_area(3), 4.0 * std::numbers::pi) < 1e-15);
    CHECK(rel(unit_sphere_area(4), 2.0 * std::numbers::pi * std::numbers::pi) < 1e-15);
}

TEST_CASE("closed-form constants against the high-precision oracle") {
    const DimensionPair d3(3, 2.0), d4(4, 2.0);
    CHECK(rel(riesz_normalization(d3), oracle::kRieszA3) < 1e-12);
    CHECK(rel(riesz_normalization(d4), oracle::kRieszA4) < 1e-12);
    CHECK(rel(hls_sharp_constant(d3), oracle::kHlsC3) < 1e-12);
    CHECK(rel(sobolev_constant(3), oracle::kSobolev3) < 1e-12);
    CHECK(rel(sobolev_constant(4), oracle::kSobolev4) < 1e-12);
    CHECK(rel(critical_sobolev_constant(d3), oracle::kSAlpha3) < 1e-12);
    CHECK(rel(critical_level_threshold(d3, 1.0), oracle::kThreshold3) < 1e-12);
}

TEST_CASE("Sobolev constant equals the bubble Rayleigh quotient") {
    CHECK(rel(sobolev_constant(3), oracle::kSobolev3Rayleigh) < 1e-12);
    CHECK(rel(sobolev_constant(4), oracle::kSobolev4Rayleigh) < 1e-12);
    CHECK(rel(sobolev_constant(4), 8.0 * std::numbers::pi / std::sqrt(6.0)) < 1e-14);
}

TEST_CASE("identities for N = 3, alpha = 2") {
    const DimensionPair d(3, 2.0);
    CHECK(std::abs(riesz_normalization(d) * hls_sharp_constant(d) * sobolev_constant(3) - 1.0) < 1e-12);
    CHECK(rel(critical_sobolev_constant(d), std::pow(sobolev_constant(3), 1.2)) < 1e-12);
    CHECK(rel(critical_level_threshold(d, 2.0), critical_level_threshold(d, 1.0) * std::pow(2.0, -0.5)) < 1e-12);
}

TEST_CASE("definitional consistency and mu power law over random (N, alpha)") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> n(3, 8);
    std::uniform_real_distribution<double> frac(0.02, 0.98), mu(0.1, 10.0);
    for (int k = 0; k < 200; ++k) {
        const int nn = n(rng);
        const DimensionPair d(nn, frac(rng) * nn);
        const auto c = constants_report(d, 1.0);
        const double lhs = c.s_alpha * std::pow(c.a_alpha * c.c_alpha, (nn - 2.0) / (nn + d.alpha()));
        CHECK(rel(lhs, c.sobolev_s) < 1e-12);
        const double m = mu(rng);
        const double scaled = critical_level_threshold(d, m) * std::pow(m, 2.0 * (nn - 2.0) / (2.0 + d.alpha()));
        CHECK(rel(scaled, c.threshold) < 1e-12);
        CHECK(critical_level_threshold(d, m * 1.5) < critical_level_threshold(d, m));
    }
    CHECK_THROWS_AS(critical_level_threshold(DimensionPair(3, 2.0), 0.0), std::domain_error);
}

}
