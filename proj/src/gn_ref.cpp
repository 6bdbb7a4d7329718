#include "strata_gn/gn_ref.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace strata_gn {

LayerFields layer_fields(const State& u, const Bathymetry& bathy, const ModelParams& p) {
    LayerFields l;
    l.h1 = 1.0 - p.eps * u.zeta;
    l.h2 = 1.0 / p.delta + p.eps * u.zeta - p.beta * bathy.b;
    if (l.h1.minCoeff() <= 0.0 || l.h2.minCoeff() <= 0.0)
        throw std::domain_error("layer depth h1 or h2 is not positive (H1)");
    Field den = l.h1 + p.gamma * l.h2;
    l.w = l.h1 * u.v / den;
    l.wbar = -l.h2 * u.v / den;
    return l;
}

Field apply_calT(const PeriodicGrid& grid, const Field& h, const Field& B, const Field& V) {
    if (h.minCoeff() <= 0.0) throw std::domain_error("calT needs h > 0");
    Field Bx = grid.deriv(B);
    Field Vx = grid.deriv(V);
    return -1.0 / (3.0 * h) * grid.deriv(h.cube() * Vx) +
           1.0 / (2.0 * h) * (grid.deriv(h.square() * Bx * V) - h.square() * Bx * Vx) +
           Bx.square() * V;
}

Field eval_Qbar(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                const ModelParams& p) {
    LayerFields l = layer_fields(u, bathy, p);
    Field zero = Field::Zero(grid.n());
    return apply_calT(grid, l.h2, p.beta * bathy.b, l.w) -
           p.gamma * apply_calT(grid, l.h1, zero, l.wbar);
}

Field eval_Qbar_expanded(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                         const ModelParams& p) {
    auto D = [&](const Field& f) { return grid.deriv(f); };
    Field h1 = 1.0 - p.eps * u.zeta;
    Field h2 = 1.0 / p.delta + p.eps * u.zeta - p.beta * bathy.b;
    Field den = h1 + p.gamma * h2;
    Field r1 = h1 * u.v / den;
    Field r2 = h2 * u.v / den;
    Field bx = bathy.bx;
    return -1.0 / (3.0 * h2) * D(h2.cube() * D(r1)) +
           1.0 / (2.0 * h2) * p.beta * (D(h2.square() * bx * r1) - h2.square() * bx * D(r1)) +
           p.beta * p.beta * bx.square() * r1 - p.gamma * (1.0 / (3.0 * h1) * D(h1.cube() * D(r2)));
}

Field eval_Rbar(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                const ModelParams& p) {
    LayerFields l = layer_fields(u, bathy, p);
    Field B = p.beta * bathy.b;
    Field zero = Field::Zero(grid.n());
    Field Bx = grid.deriv(B);
    return 0.5 * (-l.h2 * grid.deriv(l.w) + Bx * l.w).square() -
           0.5 * p.gamma * (l.h1 * grid.deriv(l.wbar)).square() -
           l.w * apply_calT(grid, l.h2, B, l.w) +
           p.gamma * l.wbar * apply_calT(grid, l.h1, zero, l.wbar);
}

Field eval_Q_expansion(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                       const CoeffTable& c, const ModelParams& p) {
    const double e = p.eps, bt = p.beta, gm = p.gamma, dl = p.delta;
    const Field& z = u.zeta;
    const Field& v = u.v;
    const Field& b = bathy.b;
    const Field& bx = bathy.bx;
    const Field& bxx = bathy.bxx;
    Field zx = grid.deriv(z), zxx = grid.deriv(z, 2);
    Field vx = grid.deriv(v), vxx = grid.deriv(v, 2);
    Field bkt = 2.0 * c.theta1 - 2.0 * c.alpha1 + (1.0 / dl - bt * b) * c.fp / 3.0 - gm / 3.0 * c.gp;
    return -c.lambda * vxx +
           e * (c.theta * v * zxx + (2.0 * c.theta + (gm - 1.0) * c.g) * zx * vx +
                (c.theta + 2.0 / 3.0 * (gm - 1.0) * c.g) * z * vxx) +
           bt * (c.alpha * v * bxx + 2.0 * c.alpha * bx * vx +
                 (gm / 3.0 * c.f + 2.0 / (3.0 * dl) * c.f) * b * vxx) +
           e * bt * ((c.theta1 - c.alpha1) * z * v * bxx + (2.0 * c.theta1 - c.alpha1) * z * bx * vx) +
           e * bt * (bkt * zx * bx * v) +
           bt * bt * (c.eta * bx.square() * v + 2.0 * gm / 3.0 * c.fp * b * bx * vx +
                      gm / 3.0 * c.fp * b * bxx * v - 1.0 / 3.0 * c.f * b.square() * vxx) +
           e * bt * bt * (c.eta1 * bx.square() * z * v) +
           bt * bt * bt * (gm / 3.0 * c.fpp * bx.square() * b * v);
}

Field eval_R_expansion(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                       const CoeffTable& c, const ModelParams& p) {
    (void)bathy;
    const Field& v = u.v;
    Field vx = grid.deriv(v), vxx = grid.deriv(v, 2);
    return (1.0 - p.gamma) * c.g.square() * (0.5 * vx.square() + v * vxx / 3.0) +
           c.s_field * v.square() + c.t_field * v * vx;
}

nlohmann::json to_json(const OrderReport& r) {
    return {{"claim", r.claim},         {"parameter", r.parameter},
            {"errors", r.errors},       {"orders", r.orders},
            {"fitted_order", r.fitted_order}, {"threshold", r.threshold},
            {"pass", r.pass}};
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("slope fit needs >= 2 matching points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void finish_order_report(OrderReport& r, double slack) {
    r.orders.clear();
    for (size_t i = 0; i + 1 < r.errors.size(); ++i)
        r.orders.push_back(std::log(r.errors[i] / r.errors[i + 1]) /
                           std::log(r.parameter[i] / r.parameter[i + 1]));
    r.fitted_order = fitted_slope(r.parameter, r.errors);
    r.pass = std::isfinite(r.fitted_order) && r.fitted_order >= r.threshold - slack;
}

Probe default_probe(int n) {
    PeriodicGrid grid(n, 2.0 * std::numbers::pi);
    const Field& x = grid.nodes();
    Bathymetry bathy = Bathymetry::from_values(grid, 0.6 + 0.25 * x.cos());
    bathy.bx = -0.25 * x.sin();
    bathy.bxx = -0.25 * x.cos();
    bathy.generator = "probe";
    State u;
    u.zeta = x.sin() + 0.3 * (2.0 * x).cos();
    u.v = 0.8 * x.cos() + 0.2 * (3.0 * x).sin();
    return {grid, bathy, u};
}

std::vector<OrderReport> expansion_order(const Probe& probe, const ModelParams& p0,
                                         const std::vector<double>& eps_sequence,
                                         const CoeffOptions& opt, double slack) {
    const PeriodicGrid& grid = probe.grid;
    const Bathymetry& bathy = probe.bathy;
    const double gm = p0.gamma, dl = p0.delta;
    Field Y = p0.beta * bathy.b;
    Field S = gm + dl - gm * dl * Y;

    OrderReport r1{"h1/(h1+gamma h2) leading", {}, {}, {}, 0, 0.9, false};
    OrderReport r2{"h2/(h1+gamma h2) leading", {}, {}, {}, 0, 0.9, false};
    OrderReport r3{"h1/(h1+gamma h2) first order", {}, {}, {}, 0, 1.9, false};
    OrderReport r4{"h2/(h1+gamma h2) first order", {}, {}, {}, 0, 1.9, false};
    OrderReport rq{"Qbar vs Q expansion", {}, {}, {}, 0, 1.9, false};
    OrderReport rr{"Rbar vs R expansion", {}, {}, {}, 0, 0.9, false};

    CoeffTable c = build_coeffs(grid, p0, bathy, opt);
    for (double e : eps_sequence) {
        ModelParams p = p0;
        p.eps = e;
        const Field& z = probe.u.zeta;
        Field h1 = 1.0 - e * z;
        Field h2 = 1.0 / dl + e * z - Y;
        Field den = h1 + gm * h2;
        Field a1 = dl / S;
        Field a2 = (1.0 - dl * Y) / S;
        Field b1 = dl / S * (1.0 - e * z + e * z * dl * (1.0 - gm) / S);
        Field b2 = dl / S * (1.0 / dl + e * z - Y + (1.0 - dl * Y) * e * z * (1.0 - gm) / S);
        for (auto* r : {&r1, &r2, &r3, &r4, &rq, &rr}) r->parameter.push_back(e);
        r1.errors.push_back(sup_norm(h1 / den - a1));
        r2.errors.push_back(sup_norm(h2 / den - a2));
        r3.errors.push_back(sup_norm(h1 / den - b1));
        r4.errors.push_back(sup_norm(h2 / den - b2));
        rq.errors.push_back(sup_norm(eval_Qbar(grid, probe.u, bathy, p) -
                                     eval_Q_expansion(grid, probe.u, bathy, c, p)));
        rr.errors.push_back(sup_norm(eval_Rbar(grid, probe.u, bathy, p) -
                                     eval_R_expansion(grid, probe.u, bathy, c, p)));
    }
    std::vector<OrderReport> out{r1, r2, r3, r4, rq, rr};
    for (auto& r : out) finish_order_report(r, slack);
    return out;
}

}  // namespace strata_gn
