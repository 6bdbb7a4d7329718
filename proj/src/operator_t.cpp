#include "strata_gn/operator_t.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstring>
#include <ostream>
#include <random>

namespace strata_gn {

std::uint64_t hash_field(const Field& f, std::uint64_t h) {
    for (Eigen::Index j = 0; j < f.size(); ++j) {
        std::uint64_t bits;
        double x = f[j];
        std::memcpy(&bits, &x, 8);
        h ^= bits;
        h *= 1099511628211ull;
    }
    return h;
}

TOperatorAssembly assemble_raw(const PeriodicGrid& grid, const Field& zeroth, const Field& a,
                               double mu) {
    grid.check(zeroth);
    grid.check(a);
    const int n = grid.n();
    TOperatorAssembly op;
    op.n = n;
    op.dx = grid.dx();
    op.mu = mu;
    op.zeroth = zeroth;
    op.a_half.resize(n);
    for (int i = 0; i < n; ++i) op.a_half[i] = 0.5 * (a[i] + a[(i + 1) % n]);
    const double s = mu / (op.dx * op.dx);
    op.diag.resize(n);
    op.sub.resize(n);
    op.sup.resize(n);
    for (int i = 0; i < n; ++i) {
        double ap = op.a_half[i], am = op.a_half[(i + n - 1) % n];
        op.diag[i] = zeroth[i] + s * (ap + am);
        op.sup[i] = -s * ap;
        op.sub[i] = -s * am;
    }
    return op;
}

TOperatorAssembly assemble(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                           const CoeffTable& c, const ModelParams& p) {
    Field zx = grid.deriv(u.zeta);
    Field z = q1_field(c, p, bathy, u.zeta) + p.mu * p.eps * p.beta * c.kappa0 * zx * bathy.bx;
    Field a = c.nu * q2_field(c, p, bathy, u.zeta);
    TOperatorAssembly op = assemble_raw(grid, z, a, p.mu);
    op.state_hash = hash_field(u.zeta);
    op.coeff_hash = hash_field(c.nu, hash_field(c.kappa2));
    return op;
}

Field apply(const TOperatorAssembly& op, const Field& v) {
    if (v.size() != op.n) throw std::invalid_argument("operator/field size mismatch");
    const int n = op.n;
    Field out(n);
    for (int i = 0; i < n; ++i)
        out[i] = op.sub[i] * v[(i + n - 1) % n] + op.diag[i] * v[i] + op.sup[i] * v[(i + 1) % n];
    return out;
}

Field solve_periodic_tridiagonal(const Field& sub, const Field& diag, const Field& sup,
                                 const Field& rhs) {
    const int n = static_cast<int>(diag.size());
    if (n < 3) throw std::invalid_argument("periodic tridiagonal solve needs n >= 3");
    const double alpha = sup[n - 1];  // row n-1, column 0
    const double beta = sub[0];       // row 0, column n-1
    const double gam = -diag[0];
    Field bb = diag;
    bb[0] -= gam;
    bb[n - 1] -= alpha * beta / gam;

    // Thomas on the modified (non-periodic) system, two right-hand sides
    Field cp(n), x(n), z(n), u = Field::Zero(n);
    u[0] = gam;
    u[n - 1] = alpha;
    double piv = bb[0];
    if (!(piv > 0.0) || !std::isfinite(piv))
        throw OperatorError("nonpositive pivot in T solve; check ellipticity (H2)");
    cp[0] = sup[0] / piv;
    x[0] = rhs[0] / piv;
    z[0] = u[0] / piv;
    for (int i = 1; i < n; ++i) {
        piv = bb[i] - sub[i] * cp[i - 1];
        if (!(piv > 0.0) || !std::isfinite(piv))
            throw OperatorError("nonpositive pivot in T solve; check ellipticity (H2)");
        cp[i] = (i < n - 1) ? sup[i] / piv : 0.0;
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / piv;
        z[i] = (u[i] - sub[i] * z[i - 1]) / piv;
    }
    for (int i = n - 2; i >= 0; --i) {
        x[i] -= cp[i] * x[i + 1];
        z[i] -= cp[i] * z[i + 1];
    }
    const double vx = x[0] + beta / gam * x[n - 1];
    const double vz = z[0] + beta / gam * z[n - 1];
    if (std::abs(1.0 + vz) < 1e-300) throw OperatorError("singular periodic tridiagonal system");
    return x - (vx / (1.0 + vz)) * z;
}

Field solve(const TOperatorAssembly& op, const Field& rhs) {
    if (rhs.size() != op.n) throw std::invalid_argument("operator/field size mismatch");
    Field x = solve_periodic_tridiagonal(op.sub, op.diag, op.sup, rhs);
    const double scale = std::max(sup_norm(rhs), 1e-300);
    Field r = rhs - apply(op, x);
    if (sup_norm(r) > 1e-13 * scale) {
        x += solve_periodic_tridiagonal(op.sub, op.diag, op.sup, r);
        r = rhs - apply(op, x);
    }
    if (!(sup_norm(r) <= 1e-10 * scale))
        throw OperatorError("T solve residual too large; check ellipticity (H2)");
    return x;
}

double h1mu_norm_sq(const TOperatorAssembly& op, const Field& v) {
    const int n = op.n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = (v[(i + 1) % n] - v[i]) / op.dx;
        acc += v[i] * v[i] + op.mu * d * d;
    }
    return op.dx * acc;
}

double rayleigh_floor(const TOperatorAssembly& op, const RayleighOptions& opt) {
    const int n = op.n;
    // mass-like operator B = I - mu D- D+
    const double s = op.mu / (op.dx * op.dx);
    Field bd = Field::Constant(n, 1.0 + 2.0 * s), bo = Field::Constant(n, -s);
    auto applyB = [&](const Field& v) {
        Field out(n);
        for (int i = 0; i < n; ++i)
            out[i] = bo[i] * v[(i + n - 1) % n] + bd[i] * v[i] + bo[i] * v[(i + 1) % n];
        return out;
    };
    if (n <= opt.dense_limit) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n), B = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            const int r = (i + 1) % n, l = (i + n - 1) % n;
            T(i, i) += op.diag[i];
            T(i, r) += op.sup[i];
            T(i, l) += op.sub[i];
            B(i, i) += bd[i];
            B(i, r) += bo[i];
            B(i, l) += bo[i];
        }
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(T, B, Eigen::EigenvaluesOnly);
        if (es.info() == Eigen::Success) return es.eigenvalues().minCoeff();
    }
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd;
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < opt.trials; ++t) {
        Field v(n);
        for (int i = 0; i < n; ++i) v[i] = nd(rng);
        double q = op.dx * (apply(op, v) * v).sum() / h1mu_norm_sq(op, v);
        best = std::min(best, q);
        for (int it = 0; it < opt.inverse_iterations; ++it) {
            v = solve_periodic_tridiagonal(op.sub, op.diag, op.sup, applyB(v));
            v /= sup_norm(v);
            q = op.dx * (apply(op, v) * v).sum() / h1mu_norm_sq(op, v);
            best = std::min(best, q);
        }
    }
    return best;
}

double continuity_constant(const TOperatorAssembly& op) {
    return std::max(sup_norm(op.zeroth), sup_norm(op.a_half));
}

void dump_csv(std::ostream& os, const TOperatorAssembly& op) {
    os << "i,sub,diag,sup\n";
    for (int i = 0; i < op.n; ++i)
        os << i << ',' << format_real(op.sub[i]) << ',' << format_real(op.diag[i]) << ','
           << format_real(op.sup[i]) << '\n';
}

}  // namespace strata_gn
