#pragma once

#include "strata_gn/chebfun.hpp"
#include "strata_gn/grid.hpp"
#include "strata_gn/params.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata_gn {

struct Bathymetry {
    Field b, bx, bxx;
    double b_min = 0.0, b_max = 0.0;
    std::string generator = "custom";
    nlohmann::json generator_params = nlohmann::json::object();

    static Bathymetry from_values(const PeriodicGrid& grid, const Field& b);
    static Bathymetry flat(const PeriodicGrid& grid, double level);
    // b = offset + amplitude * exp(-(x - center)^2 / width^2)
    static Bathymetry gaussian(const PeriodicGrid& grid, double offset, double amplitude,
                               double center, double width);
    // b = offset + amplitude * cos(2 pi k x / L)
    static Bathymetry cosine(const PeriodicGrid& grid, double offset, double amplitude,
                             int k);
    static Bathymetry from_spec(const PeriodicGrid& grid, const nlohmann::json& spec);
};

enum class PrimeConvention { BetaB, B };

std::string to_string(PrimeConvention c);
PrimeConvention prime_convention_from_string(const std::string& s);

struct CoeffOptions {
    PrimeConvention convention = PrimeConvention::BetaB;
    double ode_constant = 0.0;
    // reference value of b for the b-ODEs; default: endpoint of the b range farthest from 0
    std::optional<double> ode_reference_b;
    double exclusion_radius = 1e-6;
    LinearOdeOptions ode;
};

class CoeffError : public std::runtime_error {
public:
    CoeffError(const std::string& what, int index = -1, double value = 0.0)
        : std::runtime_error(what), index(index), value(value) {}
    int index;
    double value;
};

// Coefficients that depend on b only through Y = beta*b. Primes are c*d/dY.
struct PointCoeffs {
    double Y, S, hY;
    double lam, f, g;
    double fY, fYY, gY, gYY, nuY;
    double fp, fpp, gp, gpp, nu, nup;
    double theta, alpha, theta1, alpha1, eta, eta1;
    double Dn, Nn, K;
};

double prime_scale(const ModelParams& p, PrimeConvention conv);
PointCoeffs eval_point(const ModelParams& p, double Y, double c);

struct HigherCoeffs {
    double omega2 = 0, omega2p = 0, omega1 = 0;
    double kappa0 = 0, kappa1 = 0, kappa2 = 0, eta2 = 0, varsigma = 0;
    double W = 0, Reta = 0;
};

// Pointwise evaluator for every coefficient that is a function of b alone.
class ProfileModel {
public:
    ProfileModel(const ModelParams& p, const CoeffOptions& opt, double Ymin, double Ymax);

    const ModelParams& params() const { return p_; }
    double c() const { return c_; }
    bool has_ode() const { return ode_; }
    double Y_lo() const { return lo_; }
    double Y_hi() const { return hi_; }
    double Y_ref() const { return ref_; }

    double omega2(double Y) const;
    double omega2_Y(double Y) const;
    double omega1_of(const PointCoeffs& q, double w2) const;
    HigherCoeffs at(double Y) const;

    // defining relations evaluated with Y-derivatives taken from interpolants
    struct RelationValues {
        double lhs, rhs;
    };
    RelationValues defomega2(double Y) const;
    RelationValues defeta2(double Y) const;

    // reference-point independent ODE pieces (in the Y variable)
    double ode_n(double Y) const;
    double ode_p(double Y) const;

private:
    ModelParams p_;
    CoeffOptions opt_;
    double c_ = 1.0;
    bool ode_ = false;
    double lo_ = 0, hi_ = 0, ref_ = 0;
    ChebFun w2_, w2Y_;
    ChebFun W_, WY_;
    ChebFun k2_, k2Y_, e2_, e2Y_;

    HigherCoeffs partial(double Y) const;
};

struct CoeffTable {
    Field Y;
    Field lambda, f, g, fp, gp, fpp, gpp, nu, nup;
    Field theta, alpha, theta1, alpha1, eta, eta1;
    Field s_field, t_field;
    Field kappa0, kappa1, omega1, omega2, omega2p, kappa2, eta2, varsigma;
    Field capA, capB, capC, capD, capE, capF;
    // capF = q1 * capF0 + eps * zeta * capF1
    Field capF0, capF1;
    Field capD_long;

    PrimeConvention convention = PrimeConvention::BetaB;
    double ode_reference_b = 0.0;
    double ode_reference_Y = 0.0;
    double ode_constant = 0.0;
    bool ode_solved = false;
    std::shared_ptr<const ProfileModel> model;

    static const std::vector<std::string>& column_names();
    const Field& column(const std::string& name) const;
};

void eval_base(const ModelParams& p, const Bathymetry& bathy, const CoeffOptions& opt,
               CoeffTable& t);
void eval_second_order(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t);
void eval_st(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t);
void solve_omega2(const ModelParams& p, const Bathymetry& bathy, const CoeffOptions& opt,
                  CoeffTable& t);
void eval_omega1_kappa1_kappa0(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t);
void solve_kappa2_eta2(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t);
void eval_varsigma(const ModelParams& p, const Bathymetry& bathy, CoeffTable& t);
void eval_appendix_fields(const PeriodicGrid& grid, const ModelParams& p,
                          const Bathymetry& bathy, CoeffTable& t);

CoeffTable build_coeffs(const PeriodicGrid& grid, const ModelParams& p, const Bathymetry& bathy,
                        const CoeffOptions& opt = {});

struct RelationResidual {
    std::string name;
    double residual = 0.0;  // sup |lhs - rhs| / max(1, sup|lhs|, sup|rhs|)
    double tolerance = 1e-8;
    bool passed() const { return residual < tolerance; }
};

std::vector<RelationResidual> relation_residuals(const CoeffTable& t, const ModelParams& p,
                                                 const Bathymetry& bathy);
ValidationReport residual_report(const CoeffTable& t, const ModelParams& p,
                                 const Bathymetry& bathy);

Field q1_field(const CoeffTable& t, const ModelParams& p, const Bathymetry& bathy,
               const Field& zeta);
Field q2_field(const CoeffTable& t, const ModelParams& p, const Bathymetry& bathy,
               const Field& zeta);
Field capF_field(const CoeffTable& t, const ModelParams& p, const Bathymetry& bathy,
                 const Field& zeta);

}  // namespace strata_gn
