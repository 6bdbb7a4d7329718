#include "strata_gn/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace strata_gn {

void validate(const SimConfig& cfg) {
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
    if (cfg.snapshot_stride < 1) throw std::invalid_argument("snapshot_stride must be >= 1");
    if (cfg.hypothesis_check_stride < 1)
        throw std::invalid_argument("hypothesis_check_stride must be >= 1");
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
}

double resolve_t_end(const SimConfig& cfg, const ModelParams& p) {
    if (cfg.t_end > 0.0) return cfg.t_end;
    const double m = std::max(p.eps, p.beta);
    if (m <= 0.0) throw std::invalid_argument("t_end required when eps = beta = 0");
    return cfg.horizon / m;
}

Fluxes flux_functions(const State& u, const Bathymetry& bathy, const ModelParams& p) {
    Field h1 = 1.0 - p.eps * u.zeta;
    Field h2 = 1.0 / p.delta + p.eps * u.zeta - p.beta * bathy.b;
    if (h1.minCoeff() <= 0.0 || h2.minCoeff() <= 0.0)
        throw std::domain_error("layer depth h1 or h2 is not positive (H1)");
    Field den = h1 + p.gamma * h2;
    return {h1 * h2 / den, (h1.square() - p.gamma * h2.square()) / den.square(),
            (h1 / den).square()};
}

const TOperatorAssembly& TCache::get(const PeriodicGrid& grid, const State& u,
                                     const Bathymetry& bathy, const CoeffTable& c,
                                     const ModelParams& p) {
    const std::uint64_t h = hash_field(u.zeta);
    if (!op_ || op_->state_hash != h || op_->n != grid.n()) {
        op_ = assemble(grid, u, bathy, c, p);
        ++assemblies_;
    }
    return *op_;
}

Tendency rhs(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
             const CoeffTable& c, const ModelParams& p, TCache& cache, bool dealias) {
    const double e = p.eps, gm = p.gamma, mu = p.mu;
    Field h1 = 1.0 - e * u.zeta;
    Field h2 = 1.0 / p.delta + e * u.zeta - p.beta * bathy.b;
    if (h1.minCoeff() <= 0.0 || h2.minCoeff() <= 0.0)
        throw std::domain_error("layer depth h1 or h2 is not positive (H1)");
    Field den = h1 + gm * h2;
    Field H = h1 * h2 / den;
    Field Hp = (h1.square() - gm * h2.square()) / den.square();
    const Field& v = u.v;
    Field zx = grid.deriv(u.zeta);
    Field vx = grid.deriv(v), vxx = grid.deriv(v, 2);
    Field dHp2 = (-gm * e * zx * (h1 + h2).square() + gm * p.beta * bathy.bx * h1 * (h1 + h2)) /
                 den.cube();
    Field q1 = q1_field(c, p, bathy, u.zeta);
    Field F = capF_field(c, p, bathy, u.zeta);

    Tendency out;
    out.dzeta = -grid.deriv(H * v);
    Field r2 = -(gm + p.delta) * q1 * zx - e * q1 * (Hp - c.varsigma) * v * vx -
               e * q1 * dHp2 * v.square() +
               mu * (c.capA * v * vx + c.capB * vx.square() + c.capC * v * vxx +
                     c.capD * grid.deriv(vx.square()) + c.capE * v.square() + F * zx);
    out.dv = solve(cache.get(grid, u, bathy, c, p), r2) -
             0.5 * e * c.varsigma * grid.deriv(v.square());
    if (dealias) {
        out.dzeta = grid.dealias(out.dzeta);
        out.dv = grid.dealias(out.dv);
    }
    return out;
}

namespace {

void require_finite(const Tendency& k, int stage) {
    if (!k.dzeta.allFinite() || !k.dv.allFinite())
        throw BlowupError("non-finite tendency in RK4 stage " + std::to_string(stage), stage);
}

State axpy(const State& u, double a, const Tendency& k) {
    return {u.zeta + a * k.dzeta, u.v + a * k.dv, u.t};
}

}  // namespace

State step_rk4(const PeriodicGrid& grid, const State& u, double dt, const Bathymetry& bathy,
               const CoeffTable& c, const ModelParams& p, TCache& cache, bool dealias) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    auto stage = [&](const State& s, int i) {
        try {
            Tendency k = rhs(grid, s, bathy, c, p, cache, dealias);
            require_finite(k, i);
            return k;
        } catch (const BlowupError&) {
            throw;
        } catch (const std::exception& ex) {
            throw BlowupError("RK4 stage " + std::to_string(i) + ": " + ex.what(), i);
        }
    };
    Tendency k1 = stage(u, 1);
    Tendency k2 = stage(axpy(u, 0.5 * dt, k1), 2);
    Tendency k3 = stage(axpy(u, 0.5 * dt, k2), 3);
    Tendency k4 = stage(axpy(u, dt, k3), 4);
    State out;
    out.zeta = u.zeta + dt / 6.0 * (k1.dzeta + 2.0 * k2.dzeta + 2.0 * k3.dzeta + k4.dzeta);
    out.v = u.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    out.t = u.t + dt;
    if (!out.zeta.allFinite() || !out.v.allFinite())
        throw BlowupError("non-finite state after RK4 update", 5);
    return out;
}

double cfl_dt(const State& u, const Bathymetry& bathy, const ModelParams& p,
              const PeriodicGrid& grid, double cfl) {
    Fluxes fl = flux_functions(u, bathy, p);
    const double cmax = std::sqrt((p.gamma + p.delta) * fl.H.maxCoeff()) +
                        p.eps * (fl.Hp * u.v).abs().maxCoeff();
    return cfl * grid.dx() / cmax;
}

double mass(const PeriodicGrid& grid, const Field& zeta) { return grid.dx() * zeta.sum(); }

Field symmetrizer_weight(const State& ref, const Bathymetry& bathy, const CoeffTable& c,
                         const ModelParams& p) {
    Field h1 = 1.0 - p.eps * ref.zeta;
    Field h2 = 1.0 / p.delta + p.eps * ref.zeta - p.beta * bathy.b;
    Field den = h1 + p.gamma * h2;
    Field q1 = q1_field(c, p, bathy, ref.zeta);
    Field Q0 = (p.gamma + p.delta) * q1 - p.mu * capF_field(c, p, bathy, ref.zeta);
    Field Q1 = -p.gamma * q1 * (h1 + h2).square() / den.cube() * ref.v.square();
    return (Q0 + p.eps * p.eps * Q1) / (h1 * h2 / den);
}

double energy_form(const PeriodicGrid& grid, const State& u1, const State& u2, const State& ref,
                   const Bathymetry& bathy, const CoeffTable& c, const ModelParams& p, double s) {
    Field w = symmetrizer_weight(ref, bathy, c, p);
    TOperatorAssembly op = assemble(grid, ref, bathy, c, p);
    Field z1 = grid.bessel_potential(u1.zeta, s), z2 = grid.bessel_potential(u2.zeta, s);
    Field v1 = grid.bessel_potential(u1.v, s), v2 = grid.bessel_potential(u2.v, s);
    return grid.inner(z1, w * z2) + grid.inner(v1, apply(op, v2));
}

double energy_Es(const PeriodicGrid& grid, const State& u, const State& ref,
                 const Bathymetry& bathy, const CoeffTable& c, const ModelParams& p, double s) {
    return std::sqrt(std::max(0.0, energy_form(grid, u, u, ref, bathy, c, p, s)));
}

EquivalenceConstant energy_equivalence_constant(const PeriodicGrid& grid, const State& ref,
                                                const Bathymetry& bathy, const CoeffTable& c,
                                                const ModelParams& p) {
    Field w = symmetrizer_weight(ref, bathy, c, p);
    TOperatorAssembly op = assemble(grid, ref, bathy, c, p);
    // the forward-difference gradient only sees 4/pi^2 of the spectral one at the top mode
    const double fd = 4.0 / (std::numbers::pi * std::numbers::pi);
    const double zlo = op.zeroth.minCoeff(), alo = op.a_half.minCoeff();
    EquivalenceConstant k;
    k.lower = std::min({w.minCoeff(), zlo, alo * fd});
    k.upper = std::max({w.maxCoeff(), continuity_constant(op)});
    k.c0 = (k.lower > 0.0) ? std::max(std::sqrt(k.upper), 1.0 / std::sqrt(k.lower))
                           : std::numeric_limits<double>::infinity();
    return k;
}

namespace {

DiagnosticsRow diagnostics(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                           const CoeffTable& c, const ModelParams& p, double s) {
    DiagnosticsRow r;
    r.t = u.t;
    r.mass = mass(grid, u.zeta);
    r.Es = energy_Es(grid, u, u, bathy, c, p, s);
    r.Xs = xs_norm(grid, u, s, p.mu);
    r.h1_floor = (1.0 - p.eps * u.zeta).minCoeff();
    r.h2_floor = (1.0 / p.delta + p.eps * u.zeta - p.beta * bathy.b).minCoeff();
    Field zx = grid.deriv(u.zeta);
    r.q1_floor = (q1_field(c, p, bathy, u.zeta) + p.mu * p.eps * p.beta * c.kappa0 * zx * bathy.bx)
                     .minCoeff();
    r.q2_floor = q2_field(c, p, bathy, u.zeta).minCoeff();
    Field h1 = 1.0 - p.eps * u.zeta;
    Field h2 = 1.0 / p.delta + p.eps * u.zeta - p.beta * bathy.b;
    r.Q_floor = (symmetrizer_weight(u, bathy, c, p) * (h1 * h2 / (h1 + p.gamma * h2))).minCoeff();
    return r;
}

std::string hypothesis_failure(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                               const CoeffTable& c, const ModelParams& p, const Floors& fl) {
    ValidationReport reps[] = {check_depth(u, bathy, p, fl.h01),
                               check_ellipticity(grid, u, bathy, c, p, fl.h02),
                               check_symmetrizer_positivity(u, bathy, c, p, fl.h03)};
    for (const auto& r : reps)
        if (!r.passed)
            return r.check + " failed (" + r.violations.front().quantity + " = " +
                   format_real(r.violations.front().value) + ")";
    return {};
}

}  // namespace

SimResult simulate(const PeriodicGrid& grid, const State& initial, const Bathymetry& bathy,
                   const CoeffTable& c, const ModelParams& p, const SimConfig& cfg,
                   const Floors& floors) {
    validate(cfg);
    const double t_end = resolve_t_end(cfg, p);
    SimResult res;
    State u = initial;
    res.last_valid = u;
    if (std::string why = hypothesis_failure(grid, u, bathy, c, p, floors); !why.empty()) {
        res.error = "hypothesis check at t=0: " + why;
        return res;
    }
    res.snapshots.push_back(u);
    res.log.push_back(diagnostics(grid, u, bathy, c, p, cfg.s_energy));
    TCache cache;
    int step = 0;
    while (u.t < t_end * (1.0 - 1e-14)) {
        double dt = cfg.dt > 0.0 ? cfg.dt : cfl_dt(u, bathy, p, grid, cfg.cfl);
        dt = std::min(dt, t_end - u.t);
        try {
            u = step_rk4(grid, u, dt, bathy, c, p, cache, cfg.dealias);
        } catch (const std::exception& ex) {
            res.error = ex.what();
            return res;
        }
        ++step;
        res.steps = step;
        if (step % cfg.hypothesis_check_stride == 0) {
            if (std::string why = hypothesis_failure(grid, u, bathy, c, p, floors); !why.empty()) {
                res.error = "hypothesis check at t=" + format_real(u.t) + ": " + why;
                return res;
            }
        }
        res.last_valid = u;
        const bool last = !(u.t < t_end * (1.0 - 1e-14));
        if (step % cfg.snapshot_stride == 0 || last) {
            res.snapshots.push_back(u);
            res.log.push_back(diagnostics(grid, u, bathy, c, p, cfg.s_energy));
        }
    }
    res.completed = true;
    return res;
}

// ---------------------------------------------------------------- master test

namespace {

CField cderiv(const PeriodicGrid& grid, const CField& f, int order = 1) {
    CField out(f.size());
    out.real() = grid.deriv(f.real().eval(), order);
    out.imag() = grid.deriv(f.imag().eval(), order);
    return out;
}

CField ccalT(const PeriodicGrid& grid, const CField& h, const Field& B, const CField& V) {
    Field Bx = grid.deriv(B);
    CField Vx = cderiv(grid, V);
    CField h2 = h * h;
    return -1.0 / (3.0 * h) * cderiv(grid, h2 * h * Vx) +
           1.0 / (2.0 * h) * (cderiv(grid, h2 * Bx.cast<std::complex<double>>() * V) -
                              h2 * Bx.cast<std::complex<double>>() * Vx) +
           Bx.square().cast<std::complex<double>>() * V;
}

CField cQbar(const PeriodicGrid& grid, const CField& zeta, const CField& v,
             const Bathymetry& bathy, const ModelParams& p) {
    CField h1 = 1.0 - p.eps * zeta;
    CField h2 = (1.0 / p.delta - p.beta * bathy.b).cast<std::complex<double>>() + p.eps * zeta;
    CField den = h1 + p.gamma * h2;
    Field zero = Field::Zero(grid.n());
    return ccalT(grid, h2, p.beta * bathy.b, h1 * v / den) -
           p.gamma * ccalT(grid, h1, zero, -h2 * v / den);
}

}  // namespace

double derivation_residual(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                           const CoeffTable& c, const ModelParams& p) {
    TCache cache;
    Tendency k = rhs(grid, u, bathy, c, p, cache, false);
    const double hc = 1e-30;
    using cd = std::complex<double>;
    CField zc = u.zeta.cast<cd>() + cd(0.0, hc) * k.dzeta.cast<cd>();
    CField vc = u.v.cast<cd>() + cd(0.0, hc) * k.dv.cast<cd>();
    Field dQ = cQbar(grid, zc, vc, bathy, p).imag() / hc;
    Fluxes fl = flux_functions(u, bathy, p);
    Field E1 = k.dv + p.mu * dQ + (p.gamma + p.delta) * grid.deriv(u.zeta) +
               0.5 * p.eps * grid.deriv(fl.Hp * u.v.square()) -
               p.mu * p.eps * grid.deriv(eval_Rbar(grid, u, bathy, p)) -
               p.mu * (p.gamma + p.delta) * p.inv_bo * grid.deriv(u.zeta, 3);
    return sup_norm(q1_field(c, p, bathy, u.zeta) * E1);
}

OrderReport master_test(const Probe& probe, const ModelParams& p0,
                        const std::vector<double>& eps_sequence, const CoeffOptions& opt,
                        double threshold) {
    OrderReport r;
    r.claim = "consistency residual in mu (eps = M sqrt(mu))";
    r.threshold = threshold;
    for (double e : eps_sequence) {
        ModelParams p = p0;
        p.eps = e;
        p.mu = (e / p.M) * (e / p.M);
        CoeffTable c = build_coeffs(probe.grid, p, probe.bathy, opt);
        r.parameter.push_back(p.mu);
        r.errors.push_back(derivation_residual(probe.grid, probe.u, probe.bathy, c, p));
    }
    finish_order_report(r);
    return r;
}

}  // namespace strata_gn
