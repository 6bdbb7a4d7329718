#pragma once

#include "strata_gn/grid.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace strata_gn {

struct ModelParams {
    double mu = 0.01;
    double eps = 0.1;
    double delta = 1.0;
    double gamma = 0.5;
    double beta = 0.2;
    double inv_bo = 0.0;  // 1/bo, exactly 0 for bo = +inf

    double M = 1.0;
    double nu0 = 0.05;

    double mu_max = 1.0;
    double delta_min = 0.5;
    double delta_max = 2.0;
    double bo_min = 1.0;
    double beta_max = 1.0;
    double eps_max = 1.0;

    double bo() const {
        return inv_bo == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv_bo;
    }
    void set_bo(double bo) { inv_bo = std::isinf(bo) ? 0.0 : 1.0 / bo; }
};

struct Floors {
    double h01 = 0.05;
    double h02 = 0.05;
    double h03 = 0.05;
    double h0 = 0.05;
    double h0_exclusion = 1e-6;
};

struct Violation {
    int index = -1;
    std::string quantity;
    double value = 0.0;
};

struct ValidationReport {
    std::string check;
    bool passed = true;
    bool applicable = true;
    double floor_found = std::numeric_limits<double>::infinity();
    std::vector<Violation> violations;
    std::string note;

    void fail(int index, std::string quantity, double value) {
        violations.push_back({index, std::move(quantity), value});
        passed = false;
    }
    bool has(const std::string& quantity) const;
};

nlohmann::json to_json(const ValidationReport& r);

struct Bathymetry;
struct CoeffTable;

// roots of the H0 quadratic in Y = beta*b
struct H0Analysis {
    double discriminant = 0.0;
    std::vector<double> excluded_roots;
    bool limit_bo_infinite = false;
};

H0Analysis h0_analysis(const ModelParams& p);

ValidationReport check_regime_sw(const ModelParams& p);
ValidationReport check_regime_ch(const ModelParams& p, const Field& nu_field);
ValidationReport check_bottom_admissibility(const ModelParams& p, const Field& b_values,
                                            double exclusion_radius = 1e-6);
ValidationReport check_depth(const State& u, const Bathymetry& bathy, const ModelParams& p,
                             double h01);
ValidationReport check_ellipticity(const PeriodicGrid& grid, const State& u,
                                   const Bathymetry& bathy, const CoeffTable& c,
                                   const ModelParams& p, double h02);
ValidationReport check_symmetrizer_positivity(const State& u, const Bathymetry& bathy,
                                              const CoeffTable& c, const ModelParams& p,
                                              double h03);

struct Lemma41Result {
    ValidationReport report;
    double lhs = 0.0;
    double eps_max = 0.0;
    // floors the lemma guarantees when it passes
    double depth_floor = 0.0;
    double ellipticity_floor = 0.0;
};

Lemma41Result check_lemma41_sufficient(const PeriodicGrid& grid, const State& u,
                                       const Bathymetry& bathy, const CoeffTable& c,
                                       const ModelParams& p, double h0);

}  // namespace strata_gn
