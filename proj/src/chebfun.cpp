#include "strata_gn/chebfun.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace strata_gn {

ChebFun::ChebFun(double a, double b, std::vector<double> coeffs)
    : a_(a), b_(b), c_(std::move(coeffs)) {
    if (!(b > a)) throw std::invalid_argument("ChebFun needs a < b");
}

ChebFun ChebFun::fit(const std::function<double(double)>& fn, double a, double b, double tol,
                     int max_nodes) {
    if (!(b > a)) throw std::invalid_argument("ChebFun::fit needs a < b");
    const double pi = std::numbers::pi;
    std::vector<double> c;
    bool ok = false;
    for (int n = 17; n <= max_nodes; n = 2 * n - 1) {
        const int m = n - 1;
        std::vector<double> vals(n);
        for (int j = 0; j < n; ++j) {
            double t = std::cos(pi * j / m);
            vals[j] = fn(0.5 * (a + b) + 0.5 * (b - a) * t);
            if (!std::isfinite(vals[j]))
                throw std::runtime_error("non-finite sample while fitting Chebyshev interpolant");
        }
        c.assign(n, 0.0);
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                double w = (j == 0 || j == m) ? 0.5 : 1.0;
                s += w * vals[j] * std::cos(pi * k * j / m);
            }
            c[k] = 2.0 * s / m;
        }
        c[0] *= 0.5;
        c[m] *= 0.5;
        double scale = 0.0;
        for (double x : c) scale = std::max(scale, std::abs(x));
        double tail = 0.0;
        for (int k = std::max(0, n - 4); k < n; ++k) tail = std::max(tail, std::abs(c[k]));
        if (tail <= tol * std::max(scale, 1e-300) || scale == 0.0) {
            ok = true;
            break;
        }
    }
    ChebFun f(a, b, c);
    f.converged_ = ok;
    return f;
}

double ChebFun::operator()(double x) const {
    double t = (2.0 * x - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(c_.size()) - 1; k >= 1; --k) {
        double b0 = c_[k] + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return (c_.empty() ? 0.0 : c_[0]) + t * b1 - b2;
}

ChebFun ChebFun::derivative() const {
    const int n = static_cast<int>(c_.size());
    if (n <= 1) return ChebFun(a_, b_, {0.0});
    std::vector<double> d(n + 1, 0.0);
    for (int k = n - 1; k >= 1; --k) d[k - 1] = d[k + 1] + 2.0 * k * c_[k];
    d[0] *= 0.5;
    d.resize(n - 1);
    double s = 2.0 / (b_ - a_);
    for (double& x : d) x *= s;
    ChebFun f(a_, b_, d);
    f.converged_ = converged_;
    return f;
}

ChebFun ChebFun::integral() const {
    const int n = static_cast<int>(c_.size());
    std::vector<double> q(n + 1, 0.0);
    auto c = [&](int k) { return k < n ? c_[k] : 0.0; };
    for (int k = 1; k <= n; ++k)
        q[k] = (k == 1) ? c(0) - 0.5 * c(2) : (c(k - 1) - c(k + 1)) / (2.0 * k);
    double at_a = 0.0;
    for (int k = 1; k <= n; ++k) at_a += (k % 2 ? -1.0 : 1.0) * q[k];
    q[0] = -at_a;
    const double s = 0.5 * (b_ - a_);
    for (double& x : q) x *= s;
    ChebFun f(a_, b_, q);
    f.converged_ = converged_;
    return f;
}

double integrate(const std::function<double(double)>& fn, double a, double b, double tol,
                 int max_depth) {
    if (a == b) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 31>::integrate(fn, a, b, static_cast<unsigned>(max_depth), tol);
}

ChebFun solve_linear_ode(const std::function<double(double)>& n,
                         const std::function<double(double)>& p, double a, double b,
                         double x_ref, double C, const LinearOdeOptions& opt) {
    if (!(b > a)) throw std::invalid_argument("solve_linear_ode needs a < b");
    if (x_ref < a || x_ref > b) throw std::invalid_argument("reference point outside interval");
    ChebFun Fa = ChebFun::fit(n, a, b, opt.cheb_tol, opt.cheb_max_nodes).integral();
    const double F0 = Fa(x_ref);
    auto F = [&](double x) { return Fa(x) - F0; };
    ChebFun Ga = ChebFun::fit([&](double s) { return std::exp(F(s)) * p(s); }, a, b, opt.cheb_tol,
                              opt.cheb_max_nodes)
                     .integral();
    const double G0 = Ga(x_ref);
    ChebFun y = ChebFun::fit([&](double x) { return std::exp(-F(x)) * (C + Ga(x) - G0); }, a, b,
                             opt.cheb_tol, opt.cheb_max_nodes);
    return y;
}

}  // namespace strata_gn
