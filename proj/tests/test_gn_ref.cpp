#include "support.hpp"

#include "strata_gn/gn_ref.hpp"

#include <doctest.h>

using namespace strata_gn;
using namespace testing;

namespace {

ModelParams make(double gamma, double delta, double beta, double eps, double mu = 0.01) {
    ModelParams p;
    p.gamma = gamma;
    p.delta = delta;
    p.beta = beta;
    p.eps = eps;
    p.mu = mu;
    return p;
}

State random_state(const PeriodicGrid& g, std::mt19937_64& rng) {
    return {random_trig(g, rng, 5, 0.6), random_trig(g, rng, 5, 1.0, 0.3), 0.0};
}

}  // namespace

TEST_CASE("calT on simple inputs") {
    PeriodicGrid g(64, 2 * pi);
    Field one = Field::Ones(64), zero = Field::Zero(64);
    CHECK(max_abs(apply_calT(g, one + 0.2 * g.nodes().sin(), zero, Field::Constant(64, 2.0))) < 1e-13);
    Field c = g.nodes().cos();
    CHECK(max_abs(apply_calT(g, one, zero, c) - c / 3.0) < 1e-13);
}

TEST_CASE("calT with a sloping bottom against a product-rule expansion") {
    PeriodicGrid g(128, 2 * pi);
    const Field& x = g.nodes();
    Field h = 1.0 + 0.3 * x.sin(), B = 0.2 * x.cos(), V = (2.0 * x).sin() + 0.5;
    Field hx = 0.3 * x.cos(), Bx = -0.2 * x.sin(), Bxx = -0.2 * x.cos();
    Field Vx = 2.0 * (2.0 * x).cos(), Vxx = -4.0 * (2.0 * x).sin();
    // -(1/3h)(h^3 V')' + (1/2h)((h^2 B' V)' - h^2 B' V') + B'^2 V, expanded by hand
    Field expect = -(h.square() * Vxx + 3.0 * h * hx * Vx) / 3.0 +
                   0.5 * (2.0 * hx * Bx * V + h * Bxx * V) + Bx.square() * V;
    CHECK(max_abs(apply_calT(g, h, B, V) - expect) < 1e-12);
}

TEST_CASE("Qbar on simple inputs") {
    PeriodicGrid g(64, 2 * pi);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    ModelParams p = make(0.0, 1.0, 0.0, 0.0);
    State u{Field::Zero(64), Field::Zero(64), 0.0};
    CHECK(max_abs(eval_Qbar(g, u, flat, p)) == 0.0);
    u.v = (2.0 * g.nodes()).sin() + 0.3 * g.nodes().cos();
    CHECK(max_abs(eval_Qbar(g, u, flat, p) + g.deriv(u.v, 2) / 3.0) < 1e-12);
}

TEST_CASE("the two forms of Qbar agree") {
    PeriodicGrid g(128, 2 * pi);
    std::mt19937_64 rng(19);
    ModelParams p = make(0.5, 1.2, 0.4, 0.3);
    for (int t = 0; t < 20; ++t) {
        Bathymetry bt = Bathymetry::from_values(g, random_trig(g, rng, 3, 0.3, 0.6));
        State u = random_state(g, rng);
        CHECK(max_abs(eval_Qbar(g, u, bt, p) - eval_Qbar_expanded(g, u, bt, p)) < 1e-10);
    }
}

TEST_CASE("Qbar is linear in v") {
    PeriodicGrid g(64, 2 * pi);
    std::mt19937_64 rng(2);
    ModelParams p = make(0.5, 1.0, 0.2, 0.2);
    Bathymetry bt = Bathymetry::cosine(g, 0.5, 0.2, 1);
    State u = random_state(g, rng);
    State w = u;
    w.v *= -2.5;
    CHECK(max_abs(eval_Qbar(g, w, bt, p) + 2.5 * eval_Qbar(g, u, bt, p)) < 1e-12);
}

TEST_CASE("Rbar at beta = 0, gamma = 0") {
    PeriodicGrid g(64, 2 * pi);
    std::mt19937_64 rng(4);
    ModelParams p = make(0.0, 1.0, 0.0, 0.2);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    State u = random_state(g, rng);
    CHECK(max_abs(eval_Rbar(g, {u.zeta, Field::Zero(64), 0.0}, flat, p)) == 0.0);
    Field h2 = 1.0 + p.eps * u.zeta, zero = Field::Zero(64);
    Field w = u.v;
    Field expect = 0.5 * (h2 * g.deriv(w)).square() - w * apply_calT(g, h2, zero, w);
    CHECK(max_abs(eval_Rbar(g, u, flat, p) - expect) < 1e-12);
}

TEST_CASE("expansions at eps = beta = 0") {
    PeriodicGrid g(64, 2 * pi);
    std::mt19937_64 rng(5);
    ModelParams p = make(0.5, 1.0, 0.0, 0.0);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    CoeffTable c = build_coeffs(g, p, flat);
    State u = random_state(g, rng);
    Field vx = g.deriv(u.v), vxx = g.deriv(u.v, 2);
    CHECK(max_abs(eval_Q_expansion(g, u, flat, c, p) + c.lambda * vxx) < 1e-14);
    Field R = (1 - p.gamma) * c.g.square() * (0.5 * vx.square() + u.v * vxx / 3.0);
    CHECK(max_abs(eval_R_expansion(g, u, flat, c, p) - R) < 1e-14);
    State rest{u.zeta, Field::Zero(64), 0.0};
    CHECK(max_abs(eval_R_expansion(g, rest, flat, c, p)) == 0.0);
    CHECK(max_abs(eval_Rbar(g, rest, flat, p)) == 0.0);
}

TEST_CASE("Q expansion at gamma = 0, delta = 1, beta = 0") {
    PeriodicGrid g(64, 2 * pi);
    std::mt19937_64 rng(6);
    ModelParams p = make(0.0, 1.0, 0.0, 0.1);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    CoeffTable c = build_coeffs(g, p, flat);
    State u = random_state(g, rng);
    Field zx = g.deriv(u.zeta), vx = g.deriv(u.v), vxx = g.deriv(u.v, 2);
    // theta = 0, g = 1
    Field expect = -vxx / 3.0 + p.eps * (-zx * vx - 2.0 / 3.0 * u.zeta * vxx);
    CHECK(max_abs(eval_Q_expansion(g, u, flat, c, p) - expect) < 1e-13);
}

TEST_CASE("layer fields reject nonpositive depths") {
    PeriodicGrid g(16, 2 * pi);
    ModelParams p = make(0.5, 1.0, 0.0, 0.5);
    State u{Field::Constant(16, 3.0), Field::Zero(16), 0.0};
    CHECK_THROWS_AS(layer_fields(u, Bathymetry::flat(g, 0.0), p), std::domain_error);
}

TEST_CASE("slope fit") {
    std::vector<double> x = {0.1, 0.05, 0.025}, y;
    for (double v : x) y.push_back(3.0 * v * v);
    CHECK(fitted_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
    OrderReport r;
    r.parameter = x;
    r.errors = y;
    r.threshold = 1.9;
    finish_order_report(r);
    CHECK(r.pass);
    CHECK(r.orders.size() == 2);
    CHECK_THROWS(fitted_slope({1.0}, {1.0}));
}

TEST_CASE("expansion orders on the default probe") {
    ModelParams p = make(0.5, 1.0, 0.2, 0.1);
    auto reports = expansion_order(default_probe(128), p, {0.1, 0.05, 0.025, 0.0125});
    REQUIRE(reports.size() == 6);
    for (const auto& r : reports) {
        CAPTURE(r.claim);
        CAPTURE(r.fitted_order);
        CHECK(r.pass);
    }
}
