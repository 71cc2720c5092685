#include "choquard/riesz.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <filesystem>
#include <numbers>
#include <random>

using namespace choquard;
using testing::rel;

namespace {

// Closed form of the angular integral in R^3 for alpha != 1.
double kernel_n3(double alpha, double r, double s) {
    const double a = riesz_normalization(DimensionPair(3, alpha));
    return a * 2.0 * std::numbers::pi * (std::pow(r + s, alpha - 1.0) - std::pow(std::abs(r - s), alpha - 1.0)) /
           ((alpha - 1.0) * r * s);
}

RadialFunction gaussian(const GridPtr& g, double beta) {
    return RadialFunction::sample(g, [beta](double r) { return std::exp(-beta * r * r); });
}

}  // namespace

TEST_SUITE("riesz") {

TEST_CASE("Newtonian kernel is 1 / max(r, s)") {
    const DimensionPair d(3, 2.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> x(1e-3, 50.0);
    for (int k = 0; k < 500; ++k) {
        const double r = x(rng), s = x(rng);
        CHECK(rel(radial_kernel(d, r, s), 1.0 / std::max(r, s)) < 1e-8);
    }
    CHECK(radial_kernel(d, 0.0, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("kernel matches the closed form for other orders in R^3") {
    for (double alpha : {0.5, 1.5, 2.5}) {
        const DimensionPair d(3, alpha);
        for (auto [r, s] : {std::pair{0.5, 0.7}, {1.0, 3.0}, {2.0, 2.01}, {0.01, 5.0}}) {
            CHECK_MESSAGE(rel(radial_kernel(d, r, s), kernel_n3(alpha, r, s)) < 1e-8, "alpha " << alpha << " r " << r << " s " << s);
        }
    }
}

TEST_CASE("kernel is symmetric and homogeneous") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> x(0.01, 10.0);
    for (const auto& d : {DimensionPair(3, 1.0), DimensionPair(4, 2.0), DimensionPair(5, 3.5)}) {
        for (int k = 0; k < 50; ++k) {
            const double r = x(rng), s = x(rng), t = x(rng);
            CHECK(rel(radial_kernel(d, r, s), radial_kernel(d, s, r)) < 1e-12);
            CHECK(rel(radial_kernel(d, t * r, t * s), std::pow(t, d.alpha() - d.n()) * radial_kernel(d, r, s)) < 1e-9);
        }
    }
}

TEST_CASE("potential of the unit ball") {
    const auto g = testing::small_grid(512, 20.0, {1.0});
    const auto op = RieszOperator::build(DimensionPair(3, 2.0), g);
    const auto v = RadialFunction::sample(g, [](double r) { return r < 1.0 ? 1.0 : (r == 1.0 ? 0.5 : 0.0); });
    const auto pot = op.apply(v);
    CHECK(pot[0] == doctest::Approx(0.5).epsilon(1e-3));
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double r = g->node(i);
        worst = std::max(worst, std::abs(pot[i] - (r <= 1.0 ? (3.0 - r * r) / 6.0 : 1.0 / (3.0 * r))));
    }
    CHECK(worst < 2e-4);
    const std::size_t half = g->lower_index(0.5);
    CHECK(pot[half] == doctest::Approx((3.0 - g->node(half) * g->node(half)) / 6.0).epsilon(1e-3));
    const std::size_t two = g->lower_index(2.0);
    CHECK(pot[two] == doctest::Approx(1.0 / (3.0 * g->node(two))).epsilon(1e-3));
}

TEST_CASE("minus Laplacian inverts the Newtonian potential") {
    // Uniform cells: on graded cells the second difference of the quadrature error is O(growth - 1).
    const auto g = RadialGrid::uniform(3, 512, 10.0);
    const auto op = RieszOperator::build(DimensionPair(3, 2.0), g);
    const auto v = gaussian(g, 1.0);
    const auto lap = g->negative_laplacian(op.apply(v).values());
    double worst = 0.0;
    for (std::size_t i = g->lower_index(0.25); g->node(i) <= 2.0; ++i) worst = std::max(worst, std::abs(lap[i] - v[i]) / v[i]);
    CHECK(worst < 1e-3);
}

TEST_CASE("Gaussian Coulomb self-energy") {
    const auto& op = testing::newton_operator();
    const auto u = gaussian(op.grid_ptr(), 2.5);
    CHECK(rel(op.pairing(u, u), oracle::kGaussNonlocal) < 5e-4);
}

TEST_CASE("pairing is symmetric and linear") {
    const auto& op = testing::newton_operator();
    const auto u = gaussian(op.grid_ptr(), 0.3);
    const auto v = RadialFunction::sample(op.grid_ptr(), [](double r) { return 1.0 / (1.0 + r * r * r * r); });
    CHECK(rel(op.pairing(u, v), op.pairing(v, u)) < 1e-12);
    CHECK(rel(op.pairing(u + 2.0 * v, v), op.pairing(u, v) + 2.0 * op.pairing(v, v)) < 1e-12);
    CHECK(op.pairing(v, v) > 0.0);
}

TEST_CASE("sharp HLS bound on random radial functions") {
    const auto& op = testing::newton_operator();
    const double c = hls_sharp_constant(op.dims());
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), centre(0.0, 4.0), width(0.2, 2.0);
    for (int k = 0; k < 100; ++k) {
        const double a1 = amp(rng), c1 = centre(rng), w1 = width(rng), a2 = amp(rng), c2 = centre(rng), w2 = width(rng);
        const auto u = RadialFunction::sample(op.grid_ptr(), [&](double r) {
            return a1 * std::exp(-std::pow((r - c1) / w1, 2)) + a2 * std::exp(-std::pow((r - c2) / w2, 2));
        });
        CHECK(hls_quotient(op, u) <= c);
    }
}

TEST_CASE("optimizer ratio needs a large enough radius") {
    CHECK_THROWS_AS(hls_optimizer_ratio(testing::newton_operator()), std::runtime_error);
}

TEST_CASE("threaded assembly is bitwise identical") {
    const auto g = RadialGrid::uniform(3, 256, 5.0);
    const DimensionPair d(3, 1.3);
    const auto one = RieszOperator::build(d, g);
    const auto three = RieszOperator::build(d, g, KernelOptions{3, 16});
    CHECK((one.weighted().array() == three.weighted().array()).all());
}

TEST_CASE("kernel cache round trip") {
    const auto g = RadialGrid::uniform(3, 256, 5.0);
    const DimensionPair d(3, 2.0);
    const auto file = std::filesystem::temp_directory_path() / "choquard-test-kernel.bin";
    std::filesystem::remove(file);
    const auto built = RieszOperator::cached(d, g, file);
    CHECK(std::filesystem::exists(file));
    const auto loaded = RieszOperator::cached(d, g, file);
    CHECK((built.weighted().array() == loaded.weighted().array()).all());
    // Different alpha on the same file: rebuilt, not reused.
    const auto other = RieszOperator::cached(DimensionPair(3, 1.0), g, file);
    CHECK(other.dims().alpha() == 1.0);
    CHECK((other.weighted().array() != built.weighted().array()).any());
    std::filesystem::remove(file);
}

TEST_CASE("apply rejects functions on other grids") {
    const auto& op = testing::newton_operator();
    const auto v = gaussian(RadialGrid::uniform(3, 256, 5.0), 1.0);
    CHECK_THROWS_AS(op.apply(v), std::invalid_argument);
}

}
