#pragma once

#include "strata_gn/coeffs.hpp"
#include "strata_gn/gn_ref.hpp"
#include "strata_gn/params.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace strata_gn {

struct SuiteOptions {
    int n = 128;            // expansion claims
    int n_master = 256;     // consistency residual, fine enough that the FD operator does not bias it
    std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};
    double slack = 0.0;     // subtracted from every threshold
    int jobs = 1;
    CoeffOptions coeff;
};

struct SuiteResult {
    std::vector<OrderReport> reports;
    bool pass = true;
};

SuiteResult run_validation_suite(const ModelParams& p, const SuiteOptions& opt);

// [{"claim","orders","fitted_order","pass", ...}]
nlohmann::json to_json(const SuiteResult& r);

}  // namespace strata_gn
