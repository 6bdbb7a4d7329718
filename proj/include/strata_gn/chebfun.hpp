#pragma once

#include <functional>
#include <vector>

namespace strata_gn {

// Chebyshev interpolant on [a, b].
class ChebFun {
public:
    ChebFun() = default;
    ChebFun(double a, double b, std::vector<double> coeffs);

    // doubles the node count until the trailing coefficients fall below tol
    static ChebFun fit(const std::function<double(double)>& fn, double a, double b,
                       double tol = 1e-15, int max_nodes = 513);

    double operator()(double x) const;
    ChebFun derivative() const;
    // antiderivative vanishing at a()
    ChebFun integral() const;

    double a() const { return a_; }
    double b() const { return b_; }
    int size() const { return static_cast<int>(c_.size()); }
    bool empty() const { return c_.empty(); }
    bool converged() const { return converged_; }

private:
    double a_ = -1.0, b_ = 1.0;
    std::vector<double> c_;
    bool converged_ = true;
};

struct LinearOdeOptions {
    double cheb_tol = 1e-14;
    int cheb_max_nodes = 1025;
};

// y' + n(x) y = p(x), y(x_ref) = C, solved through the integrating factor
// y = e^{-F}(C + int_{x_ref}^x e^{F} p),  F = int_{x_ref}^x n.
// Both primitives are exact antiderivatives of Chebyshev interpolants.
ChebFun solve_linear_ode(const std::function<double(double)>& n,
                         const std::function<double(double)>& p, double a, double b,
                         double x_ref, double C, const LinearOdeOptions& opt = {});

// adaptive Gauss-Kronrod (31 point)
double integrate(const std::function<double(double)>& fn, double a, double b, double tol = 1e-12,
                 int max_depth = 15);

}  // namespace strata_gn
