#include "support.hpp"

#include "strata_gn/coeffs.hpp"
#include "strata_gn/params.hpp"

#include <doctest.h>

using namespace strata_gn;
using namespace testing;

namespace {

ModelParams flat_params(double gamma, double delta, double beta, double eps, double mu) {
    ModelParams p;
    p.gamma = gamma;
    p.delta = delta;
    p.beta = beta;
    p.eps = eps;
    p.mu = mu;
    return p;
}

}  // namespace

TEST_CASE("shallow-water regime") {
    ModelParams p = flat_params(0.5, 1.0, 0.2, 0.3, 0.1);
    CHECK(check_regime_sw(p).passed);

    ModelParams q = p;
    q.gamma = 1.0;
    ValidationReport r = check_regime_sw(q);
    CHECK_FALSE(r.passed);
    CHECK(r.has("gamma"));

    q = p;
    q.mu = 0.0;
    r = check_regime_sw(q);
    CHECK_FALSE(r.passed);
    CHECK(r.has("mu"));
}

TEST_CASE("Camassa-Holm regime") {
    ModelParams p = flat_params(0.0, 1.0, 0.0, 0.2, 0.04);
    p.nu0 = 0.1;
    Field nu = Field::Constant(16, 1.0 / 3.0);
    CHECK(check_regime_ch(p, nu).passed);

    ModelParams q = p;
    q.mu = 0.01;
    ValidationReport r = check_regime_ch(q, nu);
    CHECK_FALSE(r.passed);
    CHECK(r.has("eps <= M sqrt(mu)"));

    Field dip = nu;
    dip[5] = 0.05;
    r = check_regime_ch(p, dip);
    CHECK_FALSE(r.passed);
    CHECK(r.has("nu floor"));
    CHECK(r.violations.front().index == 5);
}

TEST_CASE("eps = M sqrt(mu) sits on the boundary") {
    ModelParams p = flat_params(0.0, 1.0, 0.0, 0.1, 0.01);
    CHECK(check_regime_ch(p, Field::Constant(4, 1.0)).passed);
}

TEST_CASE("excluded roots of the bottom quadratic") {
    ModelParams p = flat_params(0.0, 1.0, 1.0, 0.1, 0.01);
    p.set_bo(3.0);
    H0Analysis h = h0_analysis(p);
    CHECK(h.discriminant == doctest::Approx(36.0).epsilon(1e-12));
    REQUIRE(h.excluded_roots.size() == 2);
    CHECK(h.excluded_roots[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(h.excluded_roots[1] == doctest::Approx(2.0).epsilon(1e-12));

    // nu = lambda - 1/bo = 1/3 - 1/3 vanishes identically for these parameters
    Field b = Field::LinSpaced(32, 0.1, 0.5);
    ValidationReport r = check_bottom_admissibility(p, b);
    CHECK_FALSE(r.passed);
    CHECK(r.has("nu"));
    CHECK_FALSE(r.has("beta*b != 0"));
    CHECK_FALSE(r.has("excluded root"));

    // bo = 4 moves the roots to 1 -+ sqrt(3)/2
    p.set_bo(4.0);
    CHECK(check_bottom_admissibility(p, Field::LinSpaced(32, 0.2, 0.5)).passed);
    CHECK(check_bottom_admissibility(p, b).has("excluded root"));
}

TEST_CASE("bottom quadratic at infinite Bond number") {
    ModelParams p = flat_params(0.5, 1.2, 0.4, 0.1, 0.01);
    H0Analysis h = h0_analysis(p);
    CHECK(h.limit_bo_infinite);
    // delta^2 Y^2 - (gamma delta^2 + 2 delta) Y + (1 + gamma delta)
    const double A = 1.44, B = -(0.5 * 1.44 + 2.4), C = 1.6;
    CHECK(h.discriminant == doctest::Approx(B * B - 4 * A * C).epsilon(1e-14));
    for (double Y : h.excluded_roots) CHECK(std::abs(A * Y * Y + B * Y + C) < 1e-12);
}

TEST_CASE("a flat spot on a sloping bottom is rejected") {
    ModelParams p = flat_params(0.5, 1.0, 0.2, 0.1, 0.01);
    Field b = Field::LinSpaced(16, 0.2, 0.8);
    b[3] = 0.0;
    ValidationReport r = check_bottom_admissibility(p, b);
    CHECK_FALSE(r.passed);
    CHECK(r.has("beta*b != 0"));

    Field cross = Field::LinSpaced(16, -0.5, 0.5);
    cross[8] = 0.3;
    cross[7] = -0.3;
    CHECK(check_bottom_admissibility(p, cross).has("beta*b != 0"));
}

TEST_CASE("flat-bottom parameters skip the bottom check") {
    ModelParams p = flat_params(0.5, 1.0, 0.0, 0.1, 0.01);
    ValidationReport r = check_bottom_admissibility(p, Field::Zero(8));
    CHECK(r.passed);
    CHECK_FALSE(r.applicable);
}

TEST_CASE("depth checks") {
    PeriodicGrid g = unit_circle(16);
    ModelParams p = flat_params(0.5, 1.0, 0.0, 0.1, 0.01);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    State rest{Field::Zero(16), Field::Zero(16), 0.0};
    ValidationReport r = check_depth(rest, flat, p, 0.9);
    CHECK(r.passed);
    CHECK(r.floor_found == 1.0);

    State up{Field::Constant(16, 0.5), Field::Zero(16), 0.0};
    r = check_depth(up, flat, p, 0.9);
    CHECK(r.passed);
    CHECK(r.floor_found == doctest::Approx(0.95));

    p.eps = 0.5;
    State down{Field::Constant(16, -3.0), Field::Zero(16), 0.0};
    r = check_depth(down, flat, p, 0.05);
    CHECK_FALSE(r.passed);
    CHECK(r.has("h2"));
}

TEST_CASE("ellipticity and symmetrizer at eps = beta = 0") {
    PeriodicGrid g = unit_circle(32);
    ModelParams p = flat_params(0.0, 1.0, 0.0, 0.0, 0.05);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    CoeffTable c = build_coeffs(g, p, flat);
    State u{g.nodes().cos(), g.nodes().sin(), 0.0};
    ValidationReport e = check_ellipticity(g, u, flat, c, p, 1.0);
    CHECK(e.passed);
    CHECK(e.floor_found == doctest::Approx(1.0).epsilon(1e-14));
    ValidationReport s = check_symmetrizer_positivity(u, flat, c, p, 1.0);
    CHECK(s.passed);
    CHECK(s.floor_found == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("symmetrizer weight equals (gamma + delta) q1 when beta = 0") {
    PeriodicGrid g = unit_circle(32);
    ModelParams p = flat_params(0.5, 1.2, 0.0, 0.1, 0.37);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    CoeffTable c = build_coeffs(g, p, flat);
    State u{0.3 * g.nodes().cos(), Field::Zero(32), 0.0};
    Field q1 = q1_field(c, p, flat, u.zeta);
    ValidationReport s = check_symmetrizer_positivity(u, flat, c, p, 0.0);
    CHECK(s.floor_found == doctest::Approx(((p.gamma + p.delta) * q1).minCoeff()).epsilon(1e-14));
    CHECK(sup_norm(capF_field(c, p, flat, u.zeta)) == 0.0);
}

TEST_CASE("ellipticity fails when the zeta correction dominates") {
    PeriodicGrid g = unit_circle(32);
    ModelParams p = flat_params(0.5, 1.0, 0.0, 1.0, 1.0);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    CoeffTable c = build_coeffs(g, p, flat);
    const double k1 = c.kappa1[0];
    REQUIRE(k1 != 0.0);
    State u{Field::Constant(32, -2.0 / k1), Field::Zero(32), 0.0};
    ValidationReport r = check_ellipticity(g, u, flat, c, p, 0.05);
    CHECK_FALSE(r.passed);
    CHECK(r.has("q1 floor"));
}

TEST_CASE("large shear velocity breaks symmetrizer positivity") {
    PeriodicGrid g = unit_circle(32);
    ModelParams p = flat_params(0.9, 1.0, 0.0, 0.3, 0.09);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    CoeffTable c = build_coeffs(g, p, flat);
    State u{Field::Zero(32), Field::Zero(32), 0.0};
    u.v[4] = 20.0;
    // pointwise oracle of the failing value
    const double h1 = 1.0, h2 = 1.0;
    const double q1 = q1_field(c, p, flat, u.zeta)[4];
    const double Q = (p.gamma + p.delta) * q1 -
                     p.eps * p.eps * p.gamma * q1 * std::pow(h1 + h2, 2) /
                         std::pow(h1 + p.gamma * h2, 3) * 400.0;
    REQUIRE(Q < 0.0);
    ValidationReport r = check_symmetrizer_positivity(u, flat, c, p, 0.05);
    CHECK_FALSE(r.passed);
    CHECK(r.violations.size() == 1);
    CHECK(r.violations[0].index == 4);
    CHECK(r.violations[0].value == doctest::Approx(Q).epsilon(1e-13));
}

TEST_CASE("sufficient condition on trivial and failing data") {
    PeriodicGrid g = unit_circle(32);
    ModelParams p = flat_params(0.5, 1.0, 0.0, 0.1, 0.01);
    Bathymetry flat = Bathymetry::flat(g, 0.0);
    CoeffTable c = build_coeffs(g, p, flat);
    State rest{Field::Zero(32), Field::Zero(32), 0.0};
    Lemma41Result a = check_lemma41_sufficient(g, rest, flat, c, p, 0.5);
    CHECK(a.report.passed);
    CHECK(a.lhs == 0.0);

    State big{Field::Constant(32, 0.95 / a.eps_max), Field::Zero(32), 0.0};
    Lemma41Result b = check_lemma41_sufficient(g, big, flat, c, p, 0.1);
    CHECK_FALSE(b.report.passed);
    CHECK(b.lhs >= 0.95);
}

TEST_CASE("checkers are pure") {
    PeriodicGrid g = unit_circle(32);
    ModelParams p = flat_params(0.5, 1.0, 0.2, 0.1, 0.01);
    Bathymetry bt = Bathymetry::cosine(g, 0.5, 0.2, 1);
    CoeffTable c = build_coeffs(g, p, bt);
    State u{0.2 * g.nodes().sin(), 0.1 * g.nodes().cos(), 0.0};
    auto dump = [&] {
        return to_json(check_depth(u, bt, p, 0.05)).dump() +
               to_json(check_ellipticity(g, u, bt, c, p, 0.05)).dump() +
               to_json(check_symmetrizer_positivity(u, bt, c, p, 0.05)).dump() +
               to_json(check_bottom_admissibility(p, bt.b)).dump();
    };
    CHECK(dump() == dump());
}
