#include "strata_gn/validate.hpp"

#include "strata_gn/evolution.hpp"

#include <future>

namespace strata_gn {

SuiteResult run_validation_suite(const ModelParams& p, const SuiteOptions& opt) {
    auto expansions = [&] {
        return expansion_order(default_probe(opt.n), p, opt.eps, opt.coeff, opt.slack);
    };
    auto master = [&] {
        OrderReport r = master_test(default_probe(opt.n_master), p, opt.eps, opt.coeff);
        finish_order_report(r, opt.slack);
        return r;
    };
    std::vector<OrderReport> exp;
    OrderReport m;
    if (opt.jobs > 1) {
        auto fe = std::async(std::launch::async, expansions);
        m = master();
        exp = fe.get();
    } else {
        exp = expansions();
        m = master();
    }
    SuiteResult out;
    out.reports = std::move(exp);
    out.reports.push_back(std::move(m));
    for (const auto& r : out.reports) out.pass = out.pass && r.pass;
    return out;
}

nlohmann::json to_json(const SuiteResult& r) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rep : r.reports) arr.push_back(to_json(rep));
    return arr;
}

}  // namespace strata_gn
