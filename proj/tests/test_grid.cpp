#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace strata_gn;
using namespace testing;

TEST_CASE("first derivative of sin is cos") {
    PeriodicGrid g = unit_circle(32);
    Field d = g.deriv(g.nodes().sin());
    CHECK(max_abs(d - g.nodes().cos()) < 1e-13);
}

TEST_CASE("derivatives of a constant vanish at every order") {
    PeriodicGrid g = unit_circle(32);
    Field c = Field::Constant(32, 3.7);
    for (int k = 1; k <= 4; ++k) CHECK(max_abs(g.deriv(c, k)) < 1e-13);
}

TEST_CASE("higher orders on a resolved mode") {
    PeriodicGrid g = unit_circle(64);
    const Field& x = g.nodes();
    Field f = (3.0 * x).cos();
    CHECK(max_abs(g.deriv(f, 2) + 9.0 * f) < 1e-11);
    CHECK(max_abs(g.deriv(f, 3) - 27.0 * (3.0 * x).sin()) < 1e-10);
    CHECK(max_abs(g.deriv(f, 4) - 81.0 * f) < 1e-9);
}

TEST_CASE("derivative order outside 1..4 is rejected") {
    PeriodicGrid g = unit_circle(16);
    CHECK_THROWS_AS(g.deriv(g.nodes(), 5), std::invalid_argument);
    CHECK_THROWS_AS(g.deriv(g.nodes(), 0), std::invalid_argument);
}

TEST_CASE("grid construction rejects bad sizes") {
    CHECK_THROWS(PeriodicGrid(48, 1.0));
    CHECK_THROWS(PeriodicGrid(4, 1.0));
    CHECK_THROWS(PeriodicGrid(16, 0.0));
}

TEST_CASE("spectral self-convergence of exp(sin x)") {
    PeriodicGrid g64 = unit_circle(64), g128 = unit_circle(128);
    Field a = g64.deriv(g64.nodes().sin().exp(), 2);
    Field b = g128.deriv(g128.nodes().sin().exp(), 2);
    Field b_even(64);
    for (int j = 0; j < 64; ++j) b_even[j] = b[2 * j];
    CHECK(max_abs(a - b_even) < 1e-10);
}

TEST_CASE("Bessel potential") {
    PeriodicGrid g = unit_circle(64);
    Field c = g.nodes().cos();
    CHECK(max_abs(g.bessel_potential(c, 0.0) - c) < 1e-14);
    CHECK(max_abs(g.bessel_potential(c, 2.0) - 2.0 * c) < 1e-12);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t) {
        Field f = random_trig(g, rng, 20, 1.0, 0.3);
        Field r = g.bessel_potential(g.bessel_potential(f, 1.7), -1.7);
        CHECK(max_abs(r - f) < 1e-12);
    }
}

TEST_CASE("inner products on [0, 2 pi)") {
    PeriodicGrid g = unit_circle(64);
    Field c = g.nodes().cos(), s = g.nodes().sin();
    CHECK(g.inner(c, c) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(std::abs(g.inner(c, s)) < 1e-14);
    PeriodicGrid h(32, 5.0);
    Field one = Field::Ones(32);
    CHECK(h.inner(one, one) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK_THROWS(g.inner(c, one));
}

TEST_CASE("Sobolev norms of cos x") {
    PeriodicGrid g = unit_circle(64);
    Field c = g.nodes().cos();
    CHECK(g.sobolev_norm(c, 0.0) == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
    CHECK(g.sobolev_norm(c, 1.0) == doctest::Approx(std::sqrt(2.0 * pi)).epsilon(1e-13));
}

TEST_CASE("Sobolev norm is nondecreasing in s") {
    PeriodicGrid g = unit_circle(64);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
        Field f = random_trig(g, rng, 15, 1.0, 0.5);
        double prev = 0.0;
        for (double s = -2.0; s <= 3.0; s += 0.25) {
            double v = g.sobolev_norm(f, s);
            CHECK(v >= prev * (1.0 - 1e-14));
            prev = v;
        }
    }
}

TEST_CASE("X^s norm examples") {
    PeriodicGrid g = unit_circle(64);
    State zero{Field::Zero(64), Field::Zero(64), 0.0};
    CHECK(xs_norm(g, zero, 2.0, 0.1) == 0.0);
    State a{g.nodes().cos(), Field::Zero(64), 0.0};
    CHECK(xs_norm(g, a, 0.0, 0.3) == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
    State b{Field::Zero(64), g.nodes().cos(), 0.0};
    CHECK(xs_norm(g, b, 0.0, 0.3) == doctest::Approx(std::sqrt(1.3 * pi)).epsilon(1e-13));
    CHECK_THROWS(xs_norm(g, b, 0.0, 0.0));
}

TEST_CASE("X^0 norm squared matches inner products") {
    PeriodicGrid g = unit_circle(64);
    std::mt19937_64 rng(5);
    State u{random_trig(g, rng, 10, 1.0), random_trig(g, rng, 10, 1.0), 0.0};
    const double mu = 0.37;
    Field vx = g.deriv(u.v);
    double direct = g.inner(u.zeta, u.zeta) + g.inner(u.v, u.v) + mu * g.inner(vx, vx);
    CHECK(std::pow(xs_norm(g, u, 0.0, mu), 2) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("Parseval and skew adjointness") {
    PeriodicGrid g = unit_circle(128);
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
        Field f = random_trig(g, rng, 30, 1.0, 0.2), h = random_trig(g, rng, 30, 1.0, -0.4);
        CField fh = g.forward(f);
        double spec = std::norm(fh[0]);
        for (int k = 1; k < g.n() / 2; ++k) spec += 2.0 * std::norm(fh[k]);
        spec += std::norm(fh[g.n() / 2]);
        // forward is unnormalised: sum |f|^2 = spec / n
        CHECK(g.inner(f, f) == doctest::Approx(g.dx() * spec / g.n()).epsilon(1e-12));
        double lhs = g.inner(g.deriv(f), h), rhs = -g.inner(f, g.deriv(h));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        double l3 = g.inner(g.deriv(f, 3), h), r3 = -g.inner(f, g.deriv(h, 3));
        CHECK(std::abs(l3 - r3) <= 1e-12 * std::max(1.0, std::abs(l3)));
    }
}

TEST_CASE("Bessel potential commutes with derivatives") {
    PeriodicGrid g = unit_circle(64);
    std::mt19937_64 rng(9);
    Field f = random_trig(g, rng, 20, 1.0);
    CHECK(max_abs(g.deriv(g.bessel_potential(f, 1.5)) - g.bessel_potential(g.deriv(f), 1.5)) < 1e-11);
}

TEST_CASE("dealias removes the upper third of the spectrum") {
    PeriodicGrid g = unit_circle(64);
    const Field& x = g.nodes();
    Field low = (5.0 * x).cos(), high = (25.0 * x).sin();
    CHECK(max_abs(g.dealias(low + high) - low) < 1e-13);
}

TEST_CASE("CSV and binary round trips are exact") {
    PeriodicGrid g = unit_circle(32);
    std::mt19937_64 rng(1);
    Field f = random_trig(g, rng, 8, 1.0, 0.1);
    std::stringstream csv;
    write_field_csv(csv, g, f);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,value");
    csv.seekg(0);
    Field back = read_field_csv(csv, 32);
    CHECK((back == f).all());
    std::stringstream bin;
    write_field_binary(bin, f);
    Field bb = read_field_binary(bin);
    CHECK((bb == f).all());
}

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(1.0) == "1");
    double x = 1.0 / 3.0;
    CHECK(std::stod(format_real(x)) == x);
}
