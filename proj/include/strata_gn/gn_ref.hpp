#pragma once

#include "strata_gn/coeffs.hpp"
#include "strata_gn/grid.hpp"
#include "strata_gn/params.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace strata_gn {

struct LayerFields {
    Field h1, h2;
    Field w;     // h1 v / (h1 + gamma h2)
    Field wbar;  // -h2 v / (h1 + gamma h2)
};

LayerFields layer_fields(const State& u, const Bathymetry& bathy, const ModelParams& p);

// T[h, B] V with B the already scaled bottom (pass beta*b)
Field apply_calT(const PeriodicGrid& grid, const Field& h, const Field& B, const Field& V);

Field eval_Qbar(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                const ModelParams& p);
// the fully written-out second display of Qbar
Field eval_Qbar_expanded(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                         const ModelParams& p);
Field eval_Rbar(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                const ModelParams& p);

Field eval_Q_expansion(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                       const CoeffTable& c, const ModelParams& p);
Field eval_R_expansion(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                       const CoeffTable& c, const ModelParams& p);

struct OrderReport {
    std::string claim;
    std::vector<double> parameter;  // eps (or mu) sequence
    std::vector<double> errors;
    std::vector<double> orders;     // local slopes
    double fitted_order = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

nlohmann::json to_json(const OrderReport& r);

// least-squares slope of log(err) against log(param)
double fitted_slope(const std::vector<double>& param, const std::vector<double>& err);
void finish_order_report(OrderReport& r, double slack = 0.0);

struct Probe {
    PeriodicGrid grid;
    Bathymetry bathy;
    State u;
};

// smooth manufactured fields on [0, 2 pi)
Probe default_probe(int n = 128);

std::vector<OrderReport> expansion_order(const Probe& probe, const ModelParams& p,
                                         const std::vector<double>& eps_sequence,
                                         const CoeffOptions& opt = {}, double slack = 0.0);

}  // namespace strata_gn
