#pragma once

#include "choquard/riesz.hpp"

#include <doctest.h>

#include <cmath>

namespace testing {

inline double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

/// Small graded grid used wherever a kernel must be built quickly.
inline choquard::GridPtr small_grid(std::size_t cells = 512, double radius = 10.0, std::vector<double> pins = {}) {
    choquard::GridSpec gs;
    gs.cells = cells;
    gs.radius = radius;
    gs.max_ratio = 100.0;
    gs.growth = 1.02;
    gs.pins = std::move(pins);
    return choquard::RadialGrid::make(3, gs);
}

/// One shared N = 3, alpha = 2 operator on small_grid(); built on first use.
inline const choquard::RieszOperator& newton_operator() {
    static const auto op = choquard::RieszOperator::build(choquard::DimensionPair(3, 2.0), small_grid());
    return op;
}

}  // namespace testing
