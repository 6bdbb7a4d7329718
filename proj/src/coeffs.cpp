#include "strata_gn/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace strata_gn {

namespace {

Field chain_x(const Field& dY, const Field& dYY, double beta, const Bathymetry& bathy, int order) {
    if (order == 1) return dY * beta * bathy.bx;
    return dYY * beta * beta * bathy.bx.square() + dY * beta * bathy.bxx;
}

void finish_range(Bathymetry& bt) {
    bt.b_min = bt.b.minCoeff();
    bt.b_max = bt.b.maxCoeff();
}

double rel_sup(const Field& lhs, const Field& rhs) {
    double scale = std::max({1.0, sup_norm(lhs), sup_norm(rhs)});
    return sup_norm(lhs - rhs) / scale;
}

}  // namespace

// ---------------------------------------------------------------- bathymetry

Bathymetry Bathymetry::from_values(const PeriodicGrid& grid, const Field& b) {
    grid.check(b);
    Bathymetry bt;
    bt.b = b;
    bt.bx = grid.deriv(b, 1);
    bt.bxx = grid.deriv(b, 2);
    finish_range(bt);
    return bt;
}

Bathymetry Bathymetry::flat(const PeriodicGrid& grid, double level) {
    Bathymetry bt;
    bt.b = Field::Constant(grid.n(), level);
    bt.bx = Field::Zero(grid.n());
    bt.bxx = Field::Zero(grid.n());
    bt.generator = "flat";
    bt.generator_params = {{"type", "flat"}, {"offset", level}};
    finish_range(bt);
    return bt;
}

Bathymetry Bathymetry::gaussian(const PeriodicGrid& grid, double offset, double amplitude,
                                double center, double width) {
    const Field& x = grid.nodes();
    const double L = grid.length();
    Bathymetry bt;
    bt.b.resize(grid.n());
    bt.bx.resize(grid.n());
    bt.bxx.resize(grid.n());
    for (int j = 0; j < grid.n(); ++j) {
        double r = std::remainder(x[j] - center, L);
        double e = amplitude * std::exp(-r * r / (width * width));
        bt.b[j] = offset + e;
        bt.bx[j] = -2.0 * r / (width * width) * e;
        bt.bxx[j] = (4.0 * r * r / std::pow(width, 4) - 2.0 / (width * width)) * e;
    }
    bt.generator = "gaussian";
    bt.generator_params = {{"type", "gaussian"}, {"offset", offset}, {"amplitude", amplitude},
                           {"center", center},   {"width", width}};
    finish_range(bt);
    return bt;
}

Bathymetry Bathymetry::cosine(const PeriodicGrid& grid, double offset, double amplitude, int k) {
    const double kap = grid.wavenumber(k);
    const Field& x = grid.nodes();
    Bathymetry bt;
    bt.b = offset + amplitude * (kap * x).cos();
    bt.bx = -amplitude * kap * (kap * x).sin();
    bt.bxx = -amplitude * kap * kap * (kap * x).cos();
    bt.generator = "cosine";
    bt.generator_params = {{"type", "cosine"}, {"offset", offset}, {"amplitude", amplitude},
                           {"wavenumber", k}};
    finish_range(bt);
    return bt;
}

Bathymetry Bathymetry::from_spec(const PeriodicGrid& grid, const nlohmann::json& s) {
    std::string type = s.value("type", "flat");
    double offset = s.value("offset", 0.5);
    if (type == "flat") return flat(grid, offset);
    if (type == "gaussian")
        return gaussian(grid, offset, s.value("amplitude", 0.3),
                        s.value("center", 0.5 * grid.length()), s.value("width", 2.0));
    if (type == "cosine")
        return cosine(grid, offset, s.value("amplitude", 0.2), s.value("wavenumber", 1));
    throw std::invalid_argument("unknown bathymetry type: " + type);
}

// ---------------------------------------------------------------- conventions

std::string to_string(PrimeConvention c) { return c == PrimeConvention::BetaB ? "beta_b" : "b"; }

PrimeConvention prime_convention_from_string(const std::string& s) {
    if (s == "beta_b" || s == "betab") return PrimeConvention::BetaB;
    if (s == "b") return PrimeConvention::B;
    throw std::invalid_argument("unknown prime convention: " + s);
}

double prime_scale(const ModelParams& p, PrimeConvention conv) {
    return conv == PrimeConvention::BetaB ? 1.0 : p.beta;
}

PointCoeffs eval_point(const ModelParams& p, double Y, double c) {
    const double gm = p.gamma, dl = p.delta;
    PointCoeffs q{};
    q.Y = Y;
    q.S = gm + dl - gm * dl * Y;
    if (q.S == 0.0) throw CoeffError("gamma + delta - gamma*delta*beta*b vanishes", -1, Y);
    const double S = q.S;
    q.hY = 1.0 / dl - Y;
    const double h = q.hY;
    q.lam = (1.0 + gm * dl) / (3.0 * dl * S);
    q.f = dl / S;
    q.g = (1.0 - dl * Y) / S;
    q.fY = gm * dl * dl / (S * S);
    q.fYY = 2.0 * gm * gm * dl * dl * dl / (S * S * S);
    q.gY = -q.f + h * q.fY;
    q.gYY = -2.0 * q.fY + h * q.fYY;
    q.nuY = (1.0 + gm * dl) * gm / (3.0 * S * S);
    q.nu = q.lam - p.inv_bo;
    q.fp = c * q.fY;
    q.fpp = c * c * q.fYY;
    q.gp = c * q.gY;
    q.gpp = c * c * q.gYY;
    q.nup = c * q.nuY;

    const double f = q.f, g = q.g, fp = q.fp, fpp = q.fpp, gp = q.gp, gpp = q.gpp;
    const double om = 1.0 - gm;
    q.theta = h * h * f / 3.0 - h * h * om * f * f / 3.0 - gm * f / 3.0 - gm * f * g * om / 3.0;
    q.alpha = -h * h * fp / 3.0 + h * f / 2.0 - gm / (3.0 * dl) * fp + gm * f / 3.0;
    q.theta1 = h * h * fp / 3.0 - h * h * om * 2.0 * f * fp / 3.0 - h * f / 2.0 +
               h * om * f * f / 2.0 + f / 2.0 - gm * fp / 3.0 + 2.0 * gm * gp / 3.0 -
               2.0 * h * fp / 3.0;
    q.alpha1 = gm * om * (g * fp + gp * f) / 3.0;
    q.eta = -h * h * fpp / 3.0 + h * fp - gm / (3.0 * dl) * fpp + 2.0 * gm * fp / 3.0;
    q.eta1 = h * h * fpp / 3.0 - h * fp + 2.0 * h * om * fp * f -
             h * h * om * 4.0 * fp * fp / 3.0 - h * h * om * 2.0 * f * fpp / 3.0 + h * fpp / 3.0 +
             2.0 * fp - h * fpp - gm * fpp / 3.0 - gm * om / 3.0 * fpp * g -
             gm * om / 3.0 * 2.0 * fp * gp - gm * om / 3.0 * f * gpp + 2.0 * gm * gpp / 3.0 - fp;
    const double cc = gm / 3.0 + 2.0 / (3.0 * dl);
    q.Dn = q.nu - Y * cc * f + Y * Y * f / 3.0;
    q.Nn = cc * f - Y * f / 3.0;
    q.K = 2.0 * q.alpha + Y * 2.0 * gm / 3.0 * fp;
    return q;
}

// ---------------------------------------------------------------- profile model

ProfileModel::ProfileModel(const ModelParams& p, const CoeffOptions& opt, double Ymin,
                           double Ymax)
    : p_(p), opt_(opt), c_(prime_scale(p, opt.convention)) {
    ode_ = p.beta > 0.0;
    lo_ = Ymin;
    hi_ = Ymax;
    if (!ode_) return;
    if (Ymin <= 0.0 && Ymax >= 0.0)
        throw CoeffError("H0 violated: beta*b = 0 inside the bottom range", -1, 0.0);
    if (hi_ - lo_ < 1e-9 * std::max(std::abs(lo_), std::abs(hi_))) {
        double mid = 0.5 * (lo_ + hi_);
        double w = 1e-4 * std::abs(mid);
        lo_ = mid - w;
        hi_ = mid + w;
    }
    if (opt.ode_reference_b) {
        ref_ = p.beta * *opt.ode_reference_b;
        if (ref_ < lo_ || ref_ > hi_) {
            lo_ = std::min(lo_, ref_);
            hi_ = std::max(hi_, ref_);
            if (lo_ <= 0.0 && hi_ >= 0.0)
                throw CoeffError("H0 violated: ODE reference point across beta*b = 0", -1, ref_);
        }
    } else {
        ref_ = std::abs(hi_) >= std::abs(lo_) ? hi_ : lo_;
    }
    // singular set inside the range
    H0Analysis h0 = h0_analysis(p);
    for (double r : h0.excluded_roots)
        if (r >= lo_ - opt.exclusion_radius && r <= hi_ + opt.exclusion_radius)
            throw CoeffError("H0 violated: beta*b reaches an excluded root", -1, r);
    for (double y : {lo_, hi_}) {
        PointCoeffs q = eval_point(p, y, c_);
        if (std::abs(q.nu) <= opt.exclusion_radius)
            throw CoeffError("H0 violated: nu(b) = 0", -1, y);
    }
    if (eval_point(p, lo_, c_).nu * eval_point(p, hi_, c_).nu <= 0.0)
        throw CoeffError("H0 violated: nu(b) changes sign on the bottom range", -1, lo_);

    w2_ = solve_linear_ode([this](double y) { return ode_n(y); },
                           [this](double y) { return ode_p(y); }, lo_, hi_, ref_,
                           opt.ode_constant, opt.ode);
    w2Y_ = w2_.derivative();
    W_ = ChebFun::fit([this](double y) { return partial(y).W; }, lo_, hi_, opt.ode.cheb_tol,
                      opt.ode.cheb_max_nodes);
    WY_ = W_.derivative();
    k2_ = ChebFun::fit([this](double y) { return at(y).kappa2; }, lo_, hi_, opt.ode.cheb_tol,
                       opt.ode.cheb_max_nodes);
    k2Y_ = k2_.derivative();
    e2_ = ChebFun::fit([this](double y) { return at(y).eta2; }, lo_, hi_, opt.ode.cheb_tol,
                       opt.ode.cheb_max_nodes);
    e2Y_ = e2_.derivative();
}

double ProfileModel::ode_n(double Y) const {
    PointCoeffs q = eval_point(p_, Y, c_);
    return (q.nu + Y * q.nup + Y * q.K * q.nu / q.Dn) / (c_ * Y * q.nu);
}

double ProfileModel::ode_p(double Y) const {
    PointCoeffs q = eval_point(p_, Y, c_);
    return (-q.nup - q.K - Y * q.K * q.Nn / q.Dn) / (c_ * Y * q.nu);
}

double ProfileModel::omega2(double Y) const { return ode_ ? w2_(Y) : 0.0; }
double ProfileModel::omega2_Y(double Y) const { return ode_ ? w2Y_(Y) : 0.0; }

double ProfileModel::omega1_of(const PointCoeffs& q, double w2) const {
    if (!ode_) return 0.0;
    return (q.nu * w2 + q.Nn) / q.Dn;
}

HigherCoeffs ProfileModel::partial(double Y) const {
    const ModelParams& p = p_;
    PointCoeffs q = eval_point(p, Y, c_);
    HigherCoeffs h;
    const double gm = p.gamma;
    if (ode_) {
        h.omega2 = w2_(Y);
        h.omega2p = c_ * w2Y_(Y);
        h.omega1 = omega1_of(q, h.omega2);
    }
    const double o1 = 1.0 + Y * h.omega1;
    if (ode_)
        h.kappa0 = o1 * (2.0 * q.theta1 - 2.0 * q.alpha1 + q.hY * q.fp / 3.0 - gm / 3.0 * q.gp);
    h.kappa1 = (-2.0 * q.theta - (gm - 1.0) / 3.0 * q.g) * o1 / q.Dn;
    h.W = -(3.0 * q.theta + (gm - 1.0) * q.g) * o1;
    h.Reta = (-2.0 * q.theta1 + q.alpha1) * o1 - Y * h.kappa1 * (2.0 * gm / 3.0) * q.fp -
             2.0 * h.kappa1 * q.alpha;
    return h;
}

HigherCoeffs ProfileModel::at(double Y) const {
    const ModelParams& p = p_;
    const double gm = p.gamma, dl = p.delta;
    PointCoeffs q = eval_point(p, Y, c_);
    HigherCoeffs h = partial(Y);
    if (ode_ && std::abs(1.0 - c_) > 1e-12 && !WY_.empty())
        h.eta2 = (h.Reta - c_ * WY_(Y)) / (q.nu * (1.0 - c_));
    h.kappa2 = (h.W - q.nu * Y * h.eta2) / q.nu;
    const double o1 = 1.0 + Y * h.omega1;
    const double fg = q.f * q.f - gm * q.g * q.g;
    const double cc = gm / 3.0 * q.f + 2.0 / (3.0 * dl) * q.f;
    double num = (1.0 - gm) * q.g * q.g / 3.0 * o1 - p.inv_bo * fg + q.theta * q.g * o1 +
                 q.nu * Y * h.omega2 * fg + o1 * (Y * cc * fg) - o1 * (Y * Y / 3.0 * q.f * fg) -
                 Y * h.omega1 * q.lam * fg;
    double den = q.nu * (1.0 + Y * h.omega2);
    if (den == 0.0) throw CoeffError("nu(1 + beta*b*omega2) vanishes", -1, Y);
    h.varsigma = num / den;
    return h;
}

ProfileModel::RelationValues ProfileModel::defomega2(double Y) const {
    PointCoeffs q = eval_point(p_, Y, c_);
    double w2 = omega2(Y);
    double w2p = c_ * omega2_Y(Y);
    double w1 = omega1_of(q, w2);
    const double gm = p_.gamma;
    double lhs = (q.nu + Y * q.nup) * w2 + Y * q.nu * w2p;
    double rhs = -q.nup - Y * w1 * 2.0 * q.alpha - Y * Y * w1 * 2.0 * gm / 3.0 * q.fp -
                 2.0 * q.alpha - 2.0 * gm / 3.0 * q.fp * Y;
    return {lhs, rhs};
}

ProfileModel::RelationValues ProfileModel::defeta2(double Y) const {
    PointCoeffs q = eval_point(p_, Y, c_);
    HigherCoeffs h = at(Y);
    double k2p = ode_ ? c_ * k2Y_(Y) : 0.0;
    double e2p = ode_ ? c_ * e2Y_(Y) : 0.0;
    double lhs = q.nup * h.kappa2 + q.nu * k2p + (q.nu + q.nup * Y) * h.eta2 + q.nu * Y * e2p;
    return {lhs, h.Reta};
}

// ---------------------------------------------------------------- table

const std::vector<std::string>& CoeffTable::column_names() {
    static const std::vector<std::string> names = {
        "lambda", "f",      "g",        "fp",      "gp",     "fpp",    "gpp",
        "nu",     "nup",    "theta",    "alpha",   "theta1", "alpha1", "eta",
        "eta1",   "s_field", "t_field", "kappa0",  "kappa1", "omega1", "omega2",
        "kappa2", "eta2",   "varsigma", "capA",    "capB",   "capC",   "capD",
        "capE",   "capF"};
    return names;
}

const Field& CoeffTable::column(const std::string& n) const {
    if (n == "lambda") return lambda;
    if (n == "f") return f;
    if (n == "g") return g;
    if (n == "fp") return fp;
    if (n == "gp") return gp;
    if (n == "fpp") return fpp;
    if (n == "gpp") return gpp;
    if (n == "nu") return nu;
    if (n == "nup") return nup;
    if (n == "theta") return theta;
    if (n == "alpha") return alpha;
    if (n == "theta1") return theta1;
    if (n == "alpha1") return alpha1;
    if (n == "eta") return eta;
    if (n == "eta1") return eta1;
    if (n == "s_field") return s_field;
    if (n == "t_field") return t_field;
    if (n == "kappa0") return kappa0;
    if (n == "kappa1") return kappa1;
    if (n == "omega1") return omega1;
    if (n == "omega2") return omega2;
    if (n == "kappa2") return kappa2;
    if (n == "eta2") return eta2;
    if (n == "varsigma") return varsigma;
    if (n == "capA") return capA;
    if (n == "capB") return capB;
    if (n == "capC") return capC;
    if (n == "capD") return capD;
    if (n == "capE") return capE;
    if (n == "capF") return capF;
    throw std::invalid_argument("unknown coefficient column: " + n);
}

void eval_base(const ModelParams& p, const Bathymetry& bathy, const CoeffOptions& opt,
               CoeffTable& t) {
    const int n = static_cast<int>(bathy.b.size());
    const double c = prime_scale(p, opt.convention);
    t.convention = opt.convention;
    t.Y = p.beta * bathy.b;
    for (Field* fld : {&t.lambda, &t.f, &t.g, &t.fp, &t.gp, &t.fpp, &t.gpp, &t.nu, &t.nup})
        fld->resize(n);
    for (int j = 0; j < n; ++j) {
        double S = p.gamma + p.delta - p.gamma * p.delta * t.Y[j];
        if (S == 0.0)
            throw CoeffError("gamma + delta - gamma*delta*beta*b = 0 at grid index " +
                                 std::to_string(j),
                             j, S);
        PointCoeffs q = eval_point(p, t.Y[j], c);
        t.lambda[j] = q.lam;
        t.f[j] = q.f;
        t.g[j] = q.g;
        t.fp[j] = q.fp;
        t.gp[j] = q.gp;
        t.fpp[j] = q.fpp;
        t.gpp[j] = q.gpp;
        t.nu[j] = q.nu;
        t.nup[j] = q.nup;
    }
}

void eval_second_order(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t) {
    const int n = static_cast<int>(bathy.b.size());
    const double c = prime_scale(p, t.convention);
    for (Field* fld : {&t.theta, &t.alpha, &t.theta1, &t.alpha1, &t.eta, &t.eta1})
        fld->resize(n);
    for (int j = 0; j < n; ++j) {
        PointCoeffs q = eval_point(p, t.Y[j], c);
        t.theta[j] = q.theta;
        t.alpha[j] = q.alpha;
        t.theta1[j] = q.theta1;
        t.alpha1[j] = q.alpha1;
        t.eta[j] = q.eta;
        t.eta1[j] = q.eta1;
    }
}

void eval_st(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t) {
    const int n = static_cast<int>(bathy.b.size());
    const double gm = p.gamma, bt = p.beta;
    Field fY(n), fYY(n), gY(n), gYY(n);
    for (int j = 0; j < n; ++j) {
        PointCoeffs q = eval_point(p, t.Y[j], 1.0);
        fY[j] = q.fY;
        fYY[j] = q.fYY;
        gY[j] = q.gY;
        gYY[j] = q.gYY;
    }
    Field fx = chain_x(fY, fYY, bt, bathy, 1), fxx = chain_x(fY, fYY, bt, bathy, 2);
    Field gx = chain_x(gY, gYY, bt, bathy, 1), gxx = chain_x(gY, gYY, bt, bathy, 2);
    Field h = 1.0 / p.delta - t.Y;
    const Field& f = t.f;
    const Field& g = t.g;
    t.s_field = 0.5 * h.square() * fx.square() - 2.0 * h * fx * f * bt * bathy.bx +
                h.square() / 3.0 * f * fxx + bt * bt / 2.0 * bathy.bx.square() * f.square() -
                bt / 2.0 * h * bathy.bxx * f.square() - gm / 3.0 * g * gxx - gm / 2.0 * gx.square();
    t.t_field = 5.0 / 3.0 * h.square() * f * fx - 2.0 * h * f.square() * bt * bathy.bx -
                5.0 * gm / 3.0 * g * gx;
}

void solve_omega2(const ModelParams& p, const Bathymetry& bathy, const CoeffOptions& opt,
                  CoeffTable& t) {
    const int n = static_cast<int>(bathy.b.size());
    if (p.beta > 0.0) {
        for (int j = 0; j < n; ++j)
            if (std::abs(t.Y[j]) <= opt.exclusion_radius)
                throw CoeffError("H0 violated: beta*b = 0 at grid index " + std::to_string(j), j,
                                 t.Y[j]);
    }
    auto model = std::make_shared<ProfileModel>(p, opt, t.Y.minCoeff(), t.Y.maxCoeff());
    t.model = model;
    t.ode_solved = model->has_ode();
    t.ode_constant = opt.ode_constant;
    t.ode_reference_Y = model->Y_ref();
    t.ode_reference_b = p.beta > 0.0 ? model->Y_ref() / p.beta : 0.0;
    t.omega2.resize(n);
    t.omega2p.resize(n);
    for (int j = 0; j < n; ++j) {
        t.omega2[j] = model->omega2(t.Y[j]);
        t.omega2p[j] = model->c() * model->omega2_Y(t.Y[j]);
    }
}

void eval_omega1_kappa1_kappa0(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t) {
    const int n = static_cast<int>(bathy.b.size());
    const double c = prime_scale(p, t.convention);
    t.omega1.resize(n);
    t.kappa1.resize(n);
    t.kappa0.resize(n);
    for (int j = 0; j < n; ++j) {
        PointCoeffs q = eval_point(p, t.Y[j], c);
        if (std::abs(q.Dn) < 1e-14)
            throw CoeffError("omega1/kappa1 denominator vanishes at grid index " +
                                 std::to_string(j),
                             j, q.Dn);
        HigherCoeffs h = t.model->at(t.Y[j]);
        t.omega1[j] = h.omega1;
        t.kappa1[j] = h.kappa1;
        t.kappa0[j] = h.kappa0;
    }
}

void solve_kappa2_eta2(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t) {
    (void)p;
    const int n = static_cast<int>(bathy.b.size());
    t.kappa2.resize(n);
    t.eta2.resize(n);
    for (int j = 0; j < n; ++j) {
        HigherCoeffs h = t.model->at(t.Y[j]);
        t.kappa2[j] = h.kappa2;
        t.eta2[j] = h.eta2;
    }
}

void eval_varsigma(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t) {
    (void)p;
    const int n = static_cast<int>(bathy.b.size());
    t.varsigma.resize(n);
    for (int j = 0; j < n; ++j) {
        if (t.nu[j] * (1.0 + t.Y[j] * t.omega2[j]) == 0.0)
            throw CoeffError("nu(1 + beta*b*omega2) vanishes at grid index " + std::to_string(j),
                             j, 0.0);
        t.varsigma[j] = t.model->at(t.Y[j]).varsigma;
    }
}

void eval_appendix_fields(const PeriodicGrid& grid, const ModelParams& p,
                          const Bathymetry& bathy, CoeffTable& t) {
    const int n = grid.n();
    const double gm = p.gamma, dl = p.delta, bt = p.beta, ibo = p.inv_bo, eps = p.eps;
    auto D = [&](const Field& u, int k = 1) { return grid.deriv(u, k); };
    const Field& b = bathy.b;
    const Field& bx = bathy.bx;
    const Field& bxx = bathy.bxx;
    const Field &w1 = t.omega1, &w2 = t.omega2, &w2p = t.omega2p, &nu = t.nu, &nup = t.nup,
                &lam = t.lambda;
    const Field &f = t.f, &g = t.g, &fp = t.fp, &fpp = t.fpp, &gp = t.gp;
    const Field &th = t.theta, &al = t.alpha, &th1 = t.theta1, &al1 = t.alpha1, &eta = t.eta,
                &eta1 = t.eta1, &vs = t.varsigma, &s = t.s_field, &tt = t.t_field;

    Field fg = f.square() - gm * g.square();
    Field fg1 = D(fg), fg2 = D(fg, 2), fg3 = D(fg, 3);
    Field o1 = 1.0 + bt * w1 * b;
    Field o2 = 1.0 + bt * w2 * b;
    Field vsx = D(vs), vsxx = D(vs, 2);
    // x-derivative of omega2 through the chain rule in Y
    Field w2Y(n);
    for (int j = 0; j < n; ++j) w2Y[j] = t.model->omega2_Y(t.Y[j]);
    Field w2x = w2Y * bt * bx;
    Field gx = D(g), gxx = D(g, 2);
    Field bkt = 2.0 * th1 - 2.0 * al1 + (1.0 / dl - bt * b) * fp / 3.0 - gm / 3.0 * gp;
    Field cc = gm / 3.0 * f + 2.0 / (3.0 * dl) * f;
    Field bxgp = bx * gp;
    Field dbxgp = D(bxgp);
    Field Dg2 = D((1.0 - gm) * g.square());

    t.capA = 2 * eps * bt * o2 * bx * nup * fg1 + 2 * eps * bt * bt * nu * bx * w2p * b * fg1 +
             2 * eps * bt * w2 * nu * bx * fg1 + 3 * eps * bt * w2 * nu * b * fg2 -
             3 * eps * ibo * fg2 - 3 * eps * bt * w1 * b * lam * fg2 +
             eps * o1 * th * (2 * bt * dbxgp + gxx) + eps * o1 * (2 * th + (gm - 1) * g) * bt * dbxgp +
             eps * bt * o1 * al * fg * bxx + 4 * eps * bt * o1 * al * fg1 * bx +
             3 * eps * bt * o1 * cc * fg2 * b + eps * bt * o1 * (th1 - al1) * g * bxx +
             eps * bt * o1 * (2 * th1 - al1) * bt * bx.square() * gp +
             eps * bt * o1 * bkt * (bt * bx * gp + gx) * bx + eps * bt * bt * o1 * eta * bx.square() * fg +
             eps * bt * bt * o1 * gm / 3 * fp * b * bxx * fg +
             2 * eps * bt * bt * o1 * (2 * gm / 3 * fp) * b * bx * fg1 - eps * bt * bt * o1 * f * fg2 +
             eps * bt * bt * o1 * eta1 * bx.square() * g +
             eps * bt * bt * bt * o1 * (gm / 3 * fpp) * bx.square() * b * fg -
             bt * bx * nup * o2 * eps * vsx - eps * nu * o2 * vsxx -
             nu * bt * (w2x * b + w2 * bx) * eps * vsx + eps * o1 * (2 * s + D(tt));

    t.capB = eps * bt * bx * nup * o2 * fg + eps * bt * bt * nu * bx * w2p * b * fg +
             eps * bt * nu * w2 * bx * fg + 3 * eps * bt * w2 * b * nu * fg1 - 3 * eps * ibo * fg1 -
             3 * eps * bt * w1 * b * lam * fg1 + eps * o1 * (2 * th + (gm - 1) * g) * (bt * bx * gp + gx) +
             eps * bt * o1 * 2 * al * fg * bx + 3 * eps * bt * o1 * cc * fg1 * b +
             eps * bt * o1 * (2 * th1 - al1) * g * bx +
             eps * bt * bt * o1 * (2 * gm / 3 * fp) * b * bx * fg -
             eps * bt * bt * o1 * f * b.square() * fg1 - eps * bt * o2 * bx * nup * vs -
             2 * eps * nu * o2 * vsx - eps * bt * nu * (w2x * b + w2 * bx) * vs +
             eps * o1 * (0.5 * Dg2 + tt);

    t.capC = eps * bt * bx * nup * o2 * fg + eps * bt * bt * nu * bx * w2p * b * fg +
             eps * bt * nu * w2 * bx * fg + 3 * eps * bt * w2 * b * nu * fg1 - 3 * eps * ibo * fg1 -
             3 * eps * bt * w1 * b * lam * fg1 + eps * o1 * th * (bt * bx * gp + 2 * gx) +
             eps * o1 * (th + 2.0 / 3 * (gm - 1) * g) * bt * bx * gp + eps * bt * o1 * 2 * al * fg * bx +
             3 * eps * bt * o1 * cc * fg1 * b + eps * bt * o1 * bkt * g * bx +
             eps * bt * bt * o1 * (2 * gm / 3 * fp) * b * bx * fg -
             eps * bt * bt * o1 * f * b.square() * fg1 - eps * bt * bx * nup * o2 * vs -
             2 * eps * nu * o2 * vsx - eps * bt * nu * (w2x * b + w2 * bx) * vs +
             eps * o1 * (Dg2 / 3 + tt);

    t.capD = 2 * eps / 3 * o1 * (gm - 1) * g.square();
    t.capD_long = 1.5 * eps * nu * bt * w2 * b * fg - 1.5 * eps * ibo * fg -
                  1.5 * eps * bt * w1 * b * lam * fg + eps / 2 * o1 * (2 * th + (gm - 1) * g) * g +
                  eps / 2 * o1 * (th + 2.0 / 3 * (gm - 1) * g) * g + 1.5 * eps * bt * o1 * cc * fg * b -
                  1.5 * eps * bt * bt * o1 * f / 3 * b.square() * fg - 1.5 * nu * eps * vs * o2 +
                  2 * eps * (1 - gm) * g.square() / 3 * o1;

    t.capE = eps / 2 * bt * bx * nup * o2 * fg2 + eps / 2 * bt * bt * nu * bx * w2p * b * fg2 +
             eps / 2 * nu * bt * w2 * bx * fg2 + eps / 2 * nu * bt * w2 * b * fg3 -
             eps / 2 * ibo * fg3 - eps / 2 * bt * w1 * b * lam * fg3 +
             eps * bt * o1 * th * D(bxgp, 2) + eps / 2 * bt * o1 * al * fg1 * bxx +
             eps / 2 * bt * o1 * 2 * al * fg2 * bx + eps / 2 * bt * o1 * cc * fg3 * b +
             eps * bt * bt * o1 * (th1 - al1) * bx * gp * bxx + eps * bt * o1 * bkt * bt * dbxgp * bx +
             eps / 2 * bt * bt * o1 * eta * bx.square() * fg1 +
             eps / 2 * bt * bt * o1 * gm / 3 * fp * b * bxx * fg1 +
             eps / 2 * bt * bt * o1 * (2 * gm / 3 * fp) * b * bx * fg2 -
             eps / 2 * bt * bt * o1 * f / 3 * b.square() * fg3 +
             eps * bt * bt * o1 * eta1 * bx.square() * bt * bx * gp +
             eps / 2 * bt * bt * bt * o1 * (gm / 3 * fpp) * bx.square() * b * fg1 + eps * o1 * D(s);

    const double gd = gm + dl;
    t.capF0 = gd * (bt * al * bxx + bt * bt * eta * bx.square() + bt * bt * gm / 3 * fp * b * bxx +
                    bt * bt * bt * gm / 3 * fpp * b * bx.square());
    t.capF1 = gd * o1 * (bt * (th1 - al1) * bxx + bt * bt * eta1 * bx.square());
    t.capF = (1.0 + bt * w1 * b) * t.capF0;
}

CoeffTable build_coeffs(const PeriodicGrid& grid, const ModelParams& p, const Bathymetry& bathy,
                        const CoeffOptions& opt) {
    grid.check(bathy.b);
    CoeffTable t;
    t.ode_constant = opt.ode_constant;
    eval_base(p, bathy, opt, t);
    eval_second_order(p, bathy, t);
    eval_st(p, bathy, t);
    solve_omega2(p, bathy, opt, t);
    eval_omega1_kappa1_kappa0(p, bathy, t);
    solve_kappa2_eta2(p, bathy, t);
    eval_varsigma(p, bathy, t);
    eval_appendix_fields(grid, p, bathy, t);
    return t;
}

// ---------------------------------------------------------------- residuals

std::vector<RelationResidual> relation_residuals(const CoeffTable& t, const ModelParams& p,
                                                 const Bathymetry& bathy) {
    const int n = static_cast<int>(bathy.b.size());
    const double gm = p.gamma, dl = p.delta;
    const double c = prime_scale(p, t.convention);
    Field l_k0(n), r_k0(n), l_k1(n), r_k1(n), l_k2(n), r_k2(n), l_e2(n), r_e2(n), l_w1(n),
        r_w1(n), l_w2(n), r_w2(n), l_vs(n), r_vs(n);
    const bool ode = t.model && t.model->has_ode();
    for (int j = 0; j < n; ++j) {
        const double Y = t.Y[j];
        PointCoeffs q = eval_point(p, Y, c);
        const double o1 = 1.0 + Y * t.omega1[j];
        const double cc = gm / 3.0 * q.f + 2.0 / (3.0 * dl) * q.f;
        const double den = q.nu - Y * cc + Y * Y / 3.0 * q.f;

        l_k0[j] = t.kappa0[j];
        r_k0[j] = ode ? o1 * (2 * q.theta1 - 2 * q.alpha1 + (1.0 / dl - Y) * q.fp / 3.0 -
                              gm / 3.0 * q.gp)
                      : 0.0;
        l_k1[j] = t.kappa1[j] * den;
        r_k1[j] = (-2.0 * q.theta - (gm - 1.0) / 3.0 * q.g) * o1;
        l_k2[j] = q.nu * t.kappa2[j] + q.nu * Y * t.eta2[j];
        r_k2[j] = -(3.0 * q.theta + (gm - 1.0) * q.g) * o1;
        l_w1[j] = t.omega1[j] * den;
        r_w1[j] = ode ? q.nu * t.omega2[j] + cc - Y / 3.0 * q.f : 0.0;
        if (ode) {
            auto e = t.model->defeta2(Y);
            l_e2[j] = e.lhs;
            r_e2[j] = e.rhs;
            const double w2 = t.omega2[j], w1 = t.omega1[j];
            l_w2[j] = (q.nu + Y * q.nup) * w2 + Y * q.nu * t.omega2p[j];
            r_w2[j] = -q.nup - Y * w1 * 2.0 * q.alpha - Y * Y * w1 * 2.0 * gm / 3.0 * q.fp -
                      2.0 * q.alpha - 2.0 * gm / 3.0 * q.fp * Y;
        } else {
            l_e2[j] = r_e2[j] = 0.0;
            l_w2[j] = r_w2[j] = 0.0;
        }
        const double fg = q.f * q.f - gm * q.g * q.g;
        const double w2 = t.omega2[j], w1 = t.omega1[j];
        l_vs[j] = q.nu * (1.0 + Y * w2) * t.varsigma[j];
        r_vs[j] = (1.0 - gm) * q.g * q.g / 3.0 * o1 - p.inv_bo * fg + q.theta * q.g * o1 +
                  q.nu * Y * w2 * fg + o1 * (Y * cc * fg) - o1 * (Y * Y / 3.0 * q.f * fg) -
                  Y * w1 * q.lam * fg;
    }
    return {{"defkappa0", rel_sup(l_k0, r_k0)},  {"defkappa1", rel_sup(l_k1, r_k1)},
            {"defkappa2", rel_sup(l_k2, r_k2)},  {"defeta2", rel_sup(l_e2, r_e2)},
            {"defomega1", rel_sup(l_w1, r_w1)},  {"defomega2", rel_sup(l_w2, r_w2)},
            {"defvarsigma", rel_sup(l_vs, r_vs)}};
}

ValidationReport residual_report(const CoeffTable& t, const ModelParams& p,
                                 const Bathymetry& bathy) {
    ValidationReport r;
    r.check = "coefficient_residuals";
    double worst = 0.0;
    for (const auto& rr : relation_residuals(t, p, bathy)) {
        worst = std::max(worst, rr.residual);
        if (!rr.passed()) r.fail(-1, rr.name, rr.residual);
    }
    r.floor_found = worst;
    return r;
}

Field q1_field(const CoeffTable& t, const ModelParams& p, const Bathymetry& bathy,
               const Field& zeta) {
    return 1.0 + t.kappa1 * p.eps * zeta + t.omega1 * p.beta * bathy.b;
}

Field q2_field(const CoeffTable& t, const ModelParams& p, const Bathymetry& bathy,
               const Field& zeta) {
    return 1.0 + t.kappa2 * p.eps * zeta + t.omega2 * p.beta * bathy.b +
           t.eta2 * p.eps * zeta * p.beta * bathy.b;
}

Field capF_field(const CoeffTable& t, const ModelParams& p, const Bathymetry& bathy,
                 const Field& zeta) {
    return q1_field(t, p, bathy, zeta) * t.capF0 + p.eps * zeta * t.capF1;
}

}  // namespace strata_gn
