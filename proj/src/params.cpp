#include "strata_gn/params.hpp"

#include "strata_gn/coeffs.hpp"

#include <algorithm>
#include <cmath>

namespace strata_gn {

bool ValidationReport::has(const std::string& quantity) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.quantity == quantity; });
}

nlohmann::json to_json(const ValidationReport& r) {
    nlohmann::json j;
    j["check"] = r.check;
    j["passed"] = r.passed;
    if (!r.applicable) j["applicable"] = false;
    j["floor_found"] = std::isfinite(r.floor_found) ? nlohmann::json(r.floor_found) : nlohmann::json();
    j["violations"] = nlohmann::json::array();
    for (const auto& v : r.violations)
        j["violations"].push_back({{"index", v.index}, {"quantity", v.quantity}, {"value", v.value}});
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

H0Analysis h0_analysis(const ModelParams& p) {
    // delta^2 Y^2 - (gamma delta^2 + 2 delta - 3 gamma delta^2 / bo) Y
    //   + (1 + gamma delta) - 3 delta (gamma + delta) / bo, the bo-scaled quadratic
    const double g = p.gamma, d = p.delta, ib = p.inv_bo;
    const double A = d * d;
    const double B = -(g * d * d + 2.0 * d - 3.0 * g * d * d * ib);
    const double C = (1.0 + g * d) - 3.0 * d * (g + d) * ib;
    const double disc = B * B - 4.0 * A * C;
    H0Analysis h;
    h.limit_bo_infinite = (ib == 0.0);
    h.discriminant = h.limit_bo_infinite ? disc : disc / (ib * ib);
    const double scale = std::max(B * B, std::abs(4.0 * A * C));
    if (std::abs(disc) <= 1e-14 * scale) {
        h.excluded_roots = {-B / (2.0 * A)};
    } else if (disc > 0.0) {
        double sq = std::sqrt(disc);
        h.excluded_roots = {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)};
    }
    return h;
}

ValidationReport check_regime_sw(const ModelParams& p) {
    ValidationReport r;
    r.check = "regime_sw";
    if (!(p.mu > 0.0 && p.mu <= p.mu_max)) r.fail(-1, "mu", p.mu);
    if (!(p.eps >= 0.0 && p.eps <= 1.0)) r.fail(-1, "eps", p.eps);
    if (!(p.delta > p.delta_min && p.delta < p.delta_max)) r.fail(-1, "delta", p.delta);
    if (!(p.gamma >= 0.0 && p.gamma < 1.0)) r.fail(-1, "gamma", p.gamma);
    if (!(p.beta >= 0.0 && p.beta <= p.beta_max)) r.fail(-1, "beta", p.beta);
    if (!(p.inv_bo >= 0.0 && p.bo() >= p.bo_min)) r.fail(-1, "bo", p.bo());
    return r;
}

ValidationReport check_regime_ch(const ModelParams& p, const Field& nu_field) {
    ValidationReport r = check_regime_sw(p);
    r.check = "regime_ch";
    if (!(p.eps <= p.M * std::sqrt(p.mu) * (1.0 + 1e-12))) r.fail(-1, "eps <= M sqrt(mu)", p.eps);
    if (!(p.beta <= p.beta_max)) r.fail(-1, "beta <= beta_max", p.beta);
    if (nu_field.size() > 0) {
        Eigen::Index j;
        double m = nu_field.minCoeff(&j);
        r.floor_found = m;
        if (!(m >= p.nu0)) r.fail(static_cast<int>(j), "nu floor", m);
    }
    return r;
}

ValidationReport check_bottom_admissibility(const ModelParams& p, const Field& b_values,
                                            double radius) {
    ValidationReport r;
    r.check = "bottom_admissibility";
    if (p.beta == 0.0) {
        r.applicable = false;
        r.note = "not applicable: beta = 0";
        return r;
    }
    H0Analysis h = h0_analysis(p);
    const int n = static_cast<int>(b_values.size());
    double closest = std::numeric_limits<double>::infinity();
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (int j = 0; j < n; ++j) {
        double Y = p.beta * b_values[j];
        ymin = std::min(ymin, Y);
        ymax = std::max(ymax, Y);
        double nu = eval_point(p, Y, 1.0).nu;
        closest = std::min({closest, std::abs(Y), std::abs(nu)});
        if (std::abs(Y) <= radius) r.fail(j, "beta*b != 0", Y);
        if (std::abs(nu) <= radius) r.fail(j, "nu", nu);
        for (double root : h.excluded_roots) {
            closest = std::min(closest, std::abs(Y - root));
            if (std::abs(Y - root) <= radius) r.fail(j, "excluded root", Y);
        }
    }
    if (n > 0) {
        if (ymin < 0.0 && ymax > 0.0 && !r.has("beta*b != 0")) r.fail(-1, "beta*b != 0", 0.0);
        double nlo = eval_point(p, ymin, 1.0).nu, nhi = eval_point(p, ymax, 1.0).nu;
        if (nlo * nhi < 0.0 && !r.has("nu")) r.fail(-1, "nu", 0.0);
        for (double root : h.excluded_roots)
            if (root > ymin && root < ymax && !r.has("excluded root"))
                r.fail(-1, "excluded root", root);
    }
    r.floor_found = closest;
    return r;
}

ValidationReport check_depth(const State& u, const Bathymetry& bathy, const ModelParams& p,
                             double h01) {
    ValidationReport r;
    r.check = "depth";
    Field h1 = 1.0 - p.eps * u.zeta;
    Field h2 = 1.0 / p.delta + p.eps * u.zeta - p.beta * bathy.b;
    r.floor_found = std::min(h1.minCoeff(), h2.minCoeff());
    for (int j = 0; j < h1.size(); ++j) {
        if (!(h1[j] >= h01)) r.fail(j, "h1", h1[j]);
        if (!(h2[j] >= h01)) r.fail(j, "h2", h2[j]);
    }
    return r;
}

ValidationReport check_ellipticity(const PeriodicGrid& grid, const State& u,
                                   const Bathymetry& bathy, const CoeffTable& c,
                                   const ModelParams& p, double h02) {
    ValidationReport r;
    r.check = "ellipticity";
    Field zx = grid.deriv(u.zeta);
    Field a = q1_field(c, p, bathy, u.zeta) + p.mu * p.eps * p.beta * c.kappa0 * zx * bathy.bx;
    Field q2 = q2_field(c, p, bathy, u.zeta);
    r.floor_found = std::min(a.minCoeff(), q2.minCoeff());
    for (int j = 0; j < a.size(); ++j) {
        if (!(a[j] >= h02)) r.fail(j, "q1 floor", a[j]);
        if (!(q2[j] >= h02)) r.fail(j, "q2 floor", q2[j]);
    }
    return r;
}

ValidationReport check_symmetrizer_positivity(const State& u, const Bathymetry& bathy,
                                              const CoeffTable& c, const ModelParams& p,
                                              double h03) {
    ValidationReport r;
    r.check = "symmetrizer_positivity";
    Field h1 = 1.0 - p.eps * u.zeta;
    Field h2 = 1.0 / p.delta + p.eps * u.zeta - p.beta * bathy.b;
    Field q1 = q1_field(c, p, bathy, u.zeta);
    Field Q0 = (p.gamma + p.delta) * q1 - p.mu * capF_field(c, p, bathy, u.zeta);
    Field Q1 = -p.gamma * q1 * (h1 + h2).square() / (h1 + p.gamma * h2).cube() * u.v.square();
    Field Q = Q0 + p.eps * p.eps * Q1;
    r.floor_found = Q.minCoeff();
    for (int j = 0; j < Q.size(); ++j)
        if (!(Q[j] >= h03)) r.fail(j, "Q0 + eps^2 Q1", Q[j]);
    return r;
}

Lemma41Result check_lemma41_sufficient(const PeriodicGrid& grid, const State& u,
                                       const Bathymetry& bathy, const CoeffTable& c,
                                       const ModelParams& p, double h0) {
    Lemma41Result out;
    out.report.check = "lemma41_sufficient";
    const double em = std::min({p.M * std::sqrt(p.mu_max), 1.0, p.eps_max});
    out.eps_max = em;
    const double z = sup_norm(u.zeta), b = sup_norm(bathy.b);
    const double zx = sup_norm(grid.deriv(u.zeta)), bx = sup_norm(bathy.bx);
    double lhs = std::max({sup_norm(c.kappa1), sup_norm(c.kappa2), 1.0, p.delta_max}) * em * z +
                 std::max({sup_norm(c.omega1), sup_norm(c.omega2), p.delta_max}) * p.beta_max * b +
                 sup_norm(c.eta2) * em * z * p.beta_max * b +
                 p.mu_max * em * p.beta_max * sup_norm(c.kappa0) * zx * bx;
    out.lhs = lhs;
    out.report.floor_found = 1.0 - lhs;
    if (!(lhs <= 1.0 - h0)) out.report.fail(-1, "sufficient bound", lhs);
    out.depth_floor = h0 * std::min(1.0, 1.0 / p.delta);
    out.ellipticity_floor = h0;
    return out;
}

}  // namespace strata_gn
