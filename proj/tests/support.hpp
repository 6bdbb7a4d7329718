#pragma once

#include "strata_gn/grid.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace testing {

using strata_gn::Field;
using strata_gn::PeriodicGrid;

inline constexpr double pi = std::numbers::pi;

inline PeriodicGrid unit_circle(int n = 64) { return PeriodicGrid(n, 2.0 * pi); }

// random trigonometric polynomial with modes 1..kmax, mean `mean`
inline Field random_trig(const PeriodicGrid& g, std::mt19937_64& rng, int kmax, double amp,
                         double mean = 0.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Field& x = g.nodes();
    const double w = 2.0 * pi / g.length();
    Field f = Field::Constant(g.n(), mean);
    for (int k = 1; k <= kmax; ++k) {
        double a = u(rng) * amp / k, b = u(rng) * amp / k;
        f += a * (k * w * x).cos() + b * (k * w * x).sin();
    }
    return f;
}

inline double max_abs(const Field& f) { return f.abs().maxCoeff(); }

}  // namespace testing
