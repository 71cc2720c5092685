#include "choquard/model.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <random>

using namespace choquard;
using testing::rel;

namespace {

const DimensionPair d3(3, 2.0);

ProblemParams pure(double p = 5.0) { return {d3, 1.0, 1.0, p, PowerNonlinearity{0.0, 4.0}}; }
ProblemParams perturbed(double p = 5.0) { return {d3, 1.0, 1.0, p, PowerNonlinearity{1.0, 4.0}}; }

RadialFunction random_profile(const GridPtr& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.2, 1.5), width(0.4, 2.0), centre(0.0, 2.0);
    const double a = amp(rng), w = width(rng), c = centre(rng), b = amp(rng), v = width(rng);
    return RadialFunction::sample(g, [=](double r) {
        return a * std::exp(-std::pow((r - c) / w, 2)) + 0.3 * b * std::exp(-std::pow(r / v, 2));
    });
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("growth conditions") {
    const auto ok = validate_conditions(PowerNonlinearity{1.0, 4.0}, d3);
    CHECK(ok.all_pass());
    const auto low = validate_conditions(PowerNonlinearity{1.0, 2.0}, d3);
    CHECK(low.at("f2").pass);
    CHECK_FALSE(low.at("f4").pass);
    const auto high = validate_conditions(PowerNonlinearity{1.0, 5.0}, d3);
    CHECK_FALSE(high.at("f3").pass);
    const auto none = validate_conditions(PowerNonlinearity{0.0, 4.0}, d3);
    CHECK(none.at("f2").pass);
    CHECK(none.at("f3").pass);
    CHECK_FALSE(none.at("f4").pass);
    CHECK_FALSE(none.note.empty());
    CHECK_FALSE(validate_conditions(PowerNonlinearity{-1.0, 4.0}, d3).at("f1").pass);
    // N = 4 and N = 5 branches of the lower growth bound
    CHECK(validate_conditions(PowerNonlinearity{1.0, 1.6}, DimensionPair(4, 2.0)).at("f4").pass);
    CHECK_FALSE(validate_conditions(PowerNonlinearity{1.0, 0.9}, DimensionPair(4, 2.0)).at("f4").pass);
    CHECK(validate_conditions(PowerNonlinearity{1.0, 1.5}, DimensionPair(5, 2.0)).at("f4").pass);
    CHECK_FALSE(validate_conditions(PowerNonlinearity{1.0, 1.0}, DimensionPair(5, 2.0)).at("f4").pass);
    CHECK_THROWS(ok.at("f9"));
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(perturbed(5.0));
    CHECK(perturbed(5.0).critical());
    CHECK_FALSE(perturbed(4.0).critical());
    CHECK_THROWS_AS(perturbed(5.5), std::invalid_argument);
    CHECK_THROWS_AS(perturbed(5.0 / 3.0), std::invalid_argument);
    CHECK_THROWS_AS(ProblemParams(d3, 0.0, 1.0, 4.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(ProblemParams(d3, 1.0, -1.0, 4.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(ProblemParams(d3, 1.0, 1.0, 4.0, PowerNonlinearity{-0.5, 4.0}), std::invalid_argument);
    try {
        (void)perturbed(6.0);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("(1.666666667, 5]") != std::string::npos);
    }
    CHECK(rel(perturbed().constants().threshold, oracle::kThreshold3) < 1e-12);
}

TEST_CASE("source terms and derivatives") {
    const auto pp = perturbed(4.5);
    for (double s : {-1.3, -0.2, 0.0, 0.4, 2.0}) {
        CHECK(pp.source(s) == doctest::Approx(std::pow(std::abs(s), 4.5) + std::pow(std::abs(s), 4.0) / 4.0));
        const double h = 1e-6;
        CHECK(pp.source_derivative(s) == doctest::Approx((pp.source(s + h) - pp.source(s - h)) / (2 * h)).epsilon(1e-6));
        CHECK(pp.source_second_derivative(s) ==
              doctest::Approx((pp.source_derivative(s + h) - pp.source_derivative(s - h)) / (2 * h)).epsilon(1e-5));
    }
    PowerNonlinearity nl{2.0, 3.0};
    CHECK(nl.primitive(-2.0) == doctest::Approx(16.0 / 3.0));
    CHECK(nl.derivative(-2.0) == doctest::Approx(-8.0));
    CHECK(nl.primitive(0.0) == 0.0);
}

TEST_CASE("Gaussian energy breakdown") {
    const auto& op = testing::newton_operator();
    const auto u = RadialFunction::sample(op.grid_ptr(), [](double r) { return std::exp(-0.5 * r * r); });
    const auto eb = energy_breakdown(pure(), op, u);
    CHECK(rel(eb.kinetic, oracle::kGaussKinetic) < 1e-3);
    CHECK(rel(eb.mass, oracle::kGaussMass) < 1e-3);
    CHECK(rel(eb.nonlocal, oracle::kGaussNonlocal) < 1e-3);
    CHECK(rel(eb.energy, oracle::kGaussEnergy) < 1e-3);
    CHECK(rel(eb.pohozaev, oracle::kGaussPohozaev) < 1e-3);
    CHECK(std::abs(project_pohozaev(eb, d3) - oracle::kGaussTau) < 1e-3);

    const auto exact = make_breakdown(oracle::kGaussKinetic, oracle::kGaussMass, oracle::kGaussNonlocal, d3);
    CHECK(rel(exact.energy, oracle::kGaussEnergy) < 1e-14);
    CHECK(rel(exact.pohozaev, oracle::kGaussPohozaev) < 1e-14);
    CHECK(std::abs(project_pohozaev(exact, d3) - oracle::kGaussTau) < 1e-10);
    CHECK(rel(projected_energy(exact, d3), oracle::kGaussProjected) < 1e-12);
}

TEST_CASE("projected energy agrees with re-quadrature of the dilated profile") {
    GridSpec gs;
    gs.cells = 1024;
    gs.radius = 40.0;
    gs.max_ratio = 1000.0;
    gs.growth = 1.01;
    const auto g = RadialGrid::make(3, gs);
    const auto op = RieszOperator::build(d3, g);
    const auto u = RadialFunction::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
    const auto eb = energy_breakdown(pure(), op, u);
    const double tau = project_pohozaev(eb, d3);
    const auto moved = energy_breakdown(pure(), op, dilate(u, tau));
    CHECK(rel(moved.energy, projected_energy(eb, d3)) < 1e-3);
    CHECK(std::abs(moved.pohozaev) / h1_norm(dilate(u, tau)) / h1_norm(dilate(u, tau)) < 1e-3);
}

TEST_CASE("fiber polynomial closed forms") {
    const auto unit = make_breakdown(1.0, 1.0, 1.0, d3);
    CHECK(fiber_map(unit, d3, 2.0) == oracle::kUnitFiberAt2);
    CHECK(fiber_map(unit, d3, 0.0) == 0.0);
    CHECK(std::abs(project_pohozaev(unit, d3) - oracle::kUnitTau) < 1e-10);
    CHECK(std::abs(projected_energy(unit, d3) - oracle::kUnitProjected) < 1e-10);
    CHECK(std::abs(fiber_derivative(unit, d3, oracle::kUnitTau)) < 1e-12);
    CHECK(fiber_second_derivative(unit, d3, oracle::kUnitTau) < 0.0);
    CHECK_THROWS_AS(fiber_map(unit, d3, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(project_pohozaev(make_breakdown(1.0, 1.0, 0.0, d3), d3), std::domain_error);
    CHECK_THROWS_AS(project_pohozaev(make_breakdown(0.0, 1.0, 1.0, d3), d3), std::domain_error);
}

TEST_CASE("random fibers have exactly one interior maximum") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> logc(-6.0, 6.0);
    std::uniform_int_distribution<int> which(0, 2);
    const DimensionPair dims[] = {d3, DimensionPair(4, 2.0), DimensionPair(5, 0.7)};
    for (int k = 0; k < 1000; ++k) {
        const auto& d = dims[which(rng)];
        const auto eb = make_breakdown(std::exp(logc(rng)), std::exp(logc(rng)), std::exp(logc(rng)), d);
        const double t0 = project_pohozaev(eb, d);
        // Scan phi' on a log grid around t0 and count sign changes.
        int changes = 0;
        double prev = fiber_derivative(eb, d, t0 * 1e-4);
        for (int i = 1; i <= 4000; ++i) {
            const double t = t0 * std::pow(10.0, -4.0 + 8.0 * i / 4000.0);
            const double cur = fiber_derivative(eb, d, t);
            if ((prev > 0.0) != (cur > 0.0)) ++changes;
            prev = cur;
        }
        CHECK(changes == 1);
        CHECK(fiber_second_derivative(eb, d, t0) < 0.0);
        CHECK(projected_energy(eb, d) >= fiber_map(eb, d, 0.9 * t0));
        CHECK(projected_energy(eb, d) >= fiber_map(eb, d, 1.1 * t0));
    }
}

TEST_CASE("Pohozaev functional is the fiber slope at 1 on random profiles") {
    const auto& op = testing::newton_operator();
    std::mt19937_64 rng(23);
    for (int k = 0; k < 100; ++k) {
        const auto eb = energy_breakdown(perturbed(4.0 + 0.01 * k), op, random_profile(op.grid_ptr(), rng));
        CHECK(std::abs(eb.pohozaev - fiber_derivative(eb, d3, 1.0)) <= 1e-12 * std::max(1.0, std::abs(eb.pohozaev)));
        CHECK(pohozaev_decomposition(eb, d3) >= 0.0);
        CHECK(rel(pohozaev_decomposition(eb, d3), (4.0 * eb.kinetic + 2.0 * eb.mass) / 10.0) < 1e-12);
    }
}

TEST_CASE("projected energy is dilation invariant") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> c(0.1, 10.0), t(0.05, 20.0);
    for (int k = 0; k < 200; ++k) {
        const auto eb = make_breakdown(c(rng), c(rng), c(rng), d3);
        const double tau = t(rng);
        const auto moved = dilated_breakdown(eb, d3, tau);
        CHECK(rel(projected_energy(moved, d3), projected_energy(eb, d3)) < 1e-6);
        CHECK(rel(project_pohozaev(moved, d3) * tau, project_pohozaev(eb, d3)) < 1e-9);
    }
}

TEST_CASE("dilated breakdown matches quadrature of the dilated profile") {
    const auto& op = testing::newton_operator();
    const auto u = RadialFunction::sample(op.grid_ptr(), [](double r) { return std::exp(-r * r); });
    const auto pp = perturbed(4.5);
    const auto eb = energy_breakdown(pp, op, u);
    const auto scaled = dilated_breakdown(eb, d3, 1.5);
    const auto direct = energy_breakdown(pp, op, dilate(u, 1.5));
    CHECK(rel(direct.kinetic, scaled.kinetic) < 1e-3);
    CHECK(rel(direct.mass, scaled.mass) < 1e-3);
    CHECK(rel(direct.nonlocal, scaled.nonlocal) < 1e-3);
}

TEST_CASE("Young split bound on random samples") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> logs(-8.0, 8.0), p(5.0 / 3.0, 5.0);
    for (int k = 0; k < 10000; ++k) {
        const double s = std::exp(logs(rng)) * (k % 2 ? 1.0 : -1.0);
        const double q = p(rng);
        CHECK(std::pow(std::abs(s), q) <= young_split_bound(s, q, d3) * (1.0 + 1e-14));
    }
    CHECK_THROWS_AS(young_split_bound(1.0, 6.0, d3), std::invalid_argument);
}

TEST_CASE("energy gradient is the derivative of the discrete energy") {
    const auto& op = testing::newton_operator();
    std::mt19937_64 rng(37);
    const auto u = random_profile(op.grid_ptr(), rng);
    const auto v = random_profile(op.grid_ptr(), rng);
    const auto pp = perturbed(4.5);
    const auto grad = energy_gradient(pp, u, evaluate(pp, op, u));
    double directional = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) directional += grad[i] * v[i];
    const double h = 1e-5;
    const double fd = (energy_breakdown(pp, op, u + h * v).energy - energy_breakdown(pp, op, u + (-h) * v).energy) / (2 * h);
    CHECK(rel(directional, fd) < 1e-6);
}

TEST_CASE("residual normalizations") {
    const auto& op = testing::newton_operator();
    const auto u = RadialFunction::sample(op.grid_ptr(), [](double r) { return std::exp(-r * r); });
    const auto pp = perturbed(4.5);
    const auto eb = energy_breakdown(pp, op, u);
    const double n2 = std::pow(h1_norm(u), 2);
    CHECK(rel(pohozaev_residual(eb, u), std::abs(eb.pohozaev) / n2) < 1e-14);
    CHECK(el_residual(pp, op, u) > 0.0);
    CHECK_THROWS_AS(el_residual(pp, op, RadialFunction::zero(op.grid_ptr())), std::invalid_argument);
}

}
