// strata-gn: command-line front end
#include "strata_gn/coeffs.hpp"
#include "strata_gn/config.hpp"
#include "strata_gn/evolution.hpp"
#include "strata_gn/params.hpp"
#include "strata_gn/validate.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace strata_gn;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
    int jobs = 1;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config_path, "JSON config file");
    sub->add_option("--set", c.overrides, "override a config key, e.g. --set params.beta=0.3")
        ->take_all();
    sub->add_option("-o,--output-dir", c.output_dir, "output directory (overrides output_dir)");
    sub->add_option("-j,--jobs", c.jobs, "parallel jobs")->check(CLI::PositiveNumber);
}

int effective_jobs(int requested) {
    if (const char* env = std::getenv("STRATA_GN_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) return std::min(requested, cap);
    }
    return requested;
}

RunConfig resolve(const Common& c) {
    json doc = json::object();
    if (!c.config_path.empty()) {
        std::ifstream is(c.config_path);
        if (!is) throw ConfigError("cannot open config file: " + c.config_path);
        try {
            doc = json::parse(is);
        } catch (const json::parse_error& ex) {
            throw ConfigError(c.config_path + ": " + ex.what());
        }
    }
    for (const auto& o : c.overrides) apply_override(doc, o);
    if (!c.output_dir.empty()) doc["output_dir"] = c.output_dir;
    return parse_config(doc);
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    os << j.dump(2) << '\n';
}

json coefficient_metadata(const CoeffTable& t) {
    return {{"prime_convention", to_string(t.convention)},
            {"ode_solved", t.ode_solved},
            {"ode_reference_b", t.ode_reference_b},
            {"ode_reference_Y", t.ode_reference_Y},
            {"ode_constant", t.ode_constant}};
}

// every validator; the sufficient condition is reported but does not gate the exit code
int cmd_check(const RunConfig& cfg) {
    const ModelParams& p = cfg.params;
    PeriodicGrid grid = make_grid(cfg);
    Bathymetry bathy = make_bathymetry(grid, cfg.bathymetry);
    State u = make_initial(grid, cfg.initial, p);
    json reports = json::array();
    bool ok = true;
    auto add = [&](const ValidationReport& r, bool gating = true) {
        json j = to_json(r);
        if (!gating) j["gating"] = false;
        reports.push_back(j);
        if (gating && r.applicable && !r.passed) ok = false;
    };
    add(check_regime_sw(p));
    Field nu(grid.n());
    for (int j = 0; j < grid.n(); ++j) nu[j] = eval_point(p, p.beta * bathy.b[j], 1.0).nu;
    add(check_regime_ch(p, nu));
    ValidationReport h0 = check_bottom_admissibility(p, bathy.b, cfg.floors.h0_exclusion);
    add(h0);
    if (h0.passed || !h0.applicable) {
        try {
            CoeffTable c = build_coeffs(grid, p, bathy, cfg.coeff);
            add(check_depth(u, bathy, p, cfg.floors.h01));
            add(check_ellipticity(grid, u, bathy, c, p, cfg.floors.h02));
            add(check_symmetrizer_positivity(u, bathy, c, p, cfg.floors.h03));
            add(check_lemma41_sufficient(grid, u, bathy, c, p, cfg.floors.h0).report, false);
        } catch (const CoeffError& ex) {
            ValidationReport r;
            r.check = "coefficients";
            r.fail(ex.index, "coefficient pipeline", ex.value);
            r.note = ex.what();
            add(r);
        }
    } else {
        add(check_depth(u, bathy, p, cfg.floors.h01));
    }
    json out = {{"passed", ok}, {"reports", reports}};
    std::cout << out.dump(2) << '\n';
    return ok ? 0 : 1;
}

int cmd_coeffs(const RunConfig& cfg, const std::string& csv_path, bool strict) {
    const ModelParams& p = cfg.params;
    PeriodicGrid grid = make_grid(cfg);
    Bathymetry bathy = make_bathymetry(grid, cfg.bathymetry);
    ValidationReport h0 = check_bottom_admissibility(p, bathy.b, cfg.floors.h0_exclusion);
    if (h0.applicable && !h0.passed) {
        std::cout << to_json(h0).dump(2) << '\n';
        return 1;
    }
    CoeffTable t;
    try {
        t = build_coeffs(grid, p, bathy, cfg.coeff);
    } catch (const CoeffError& ex) {
        json j = {{"error", ex.what()}, {"index", ex.index}, {"value", ex.value},
                  {"h0", to_json(h0)}};
        std::cout << j.dump(2) << '\n';
        return 1;
    }
    fs::path out = csv_path.empty() ? fs::path(cfg.output_dir) / "coeffs.csv" : fs::path(csv_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    {
        std::ofstream os(out);
        const auto& names = CoeffTable::column_names();
        for (size_t k = 0; k < names.size(); ++k) os << (k ? "," : "") << names[k];
        os << '\n';
        for (int j = 0; j < grid.n(); ++j) {
            for (size_t k = 0; k < names.size(); ++k)
                os << (k ? "," : "") << format_real(t.column(names[k])[j]);
            os << '\n';
        }
    }
    json res = json::array();
    bool all = true;
    for (const auto& r : relation_residuals(t, p, bathy)) {
        res.push_back({{"relation", r.name},
                       {"residual", r.residual},
                       {"tolerance", r.tolerance},
                       {"passed", r.passed()}});
        all = all && r.passed();
    }
    json j = {{"table", out.string()}, {"metadata", coefficient_metadata(t)},
              {"residuals", res}, {"passed", all}};
    std::cout << j.dump(2) << '\n';
    return (strict && !all) ? 1 : 0;
}

void write_snapshots(std::ostream& os, const PeriodicGrid& grid, const std::vector<State>& snaps) {
    os << "t,x,zeta,v\n";
    for (const auto& s : snaps)
        for (int j = 0; j < grid.n(); ++j)
            os << format_real(s.t) << ',' << format_real(grid.nodes()[j]) << ','
               << format_real(s.zeta[j]) << ',' << format_real(s.v[j]) << '\n';
}

int cmd_simulate(const RunConfig& cfg) {
    const ModelParams& p = cfg.params;
    PeriodicGrid grid = make_grid(cfg);
    Bathymetry bathy = make_bathymetry(grid, cfg.bathymetry);
    State u0 = make_initial(grid, cfg.initial, p);
    CoeffTable c;
    try {
        c = build_coeffs(grid, p, bathy, cfg.coeff);
    } catch (const CoeffError& ex) {
        std::cerr << "coefficient pipeline failed: " << ex.what() << '\n';
        return 1;
    }
    SimResult res = simulate(grid, u0, bathy, c, p, cfg.sim, cfg.floors);
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "snapshots.csv");
        std::vector<State> snaps = res.snapshots;
        if (!res.completed && (snaps.empty() || snaps.back().t != res.last_valid.t))
            snaps.push_back(res.last_valid);
        write_snapshots(os, grid, snaps);
    }
    {
        std::ofstream os(dir / "diagnostics.csv");
        os << "t,mass,Es,Xs,h1_floor,h2_floor,q1_floor,q2_floor,Q_floor\n";
        for (const auto& r : res.log)
            os << format_real(r.t) << ',' << format_real(r.mass) << ',' << format_real(r.Es) << ','
               << format_real(r.Xs) << ',' << format_real(r.h1_floor) << ','
               << format_real(r.h2_floor) << ',' << format_real(r.q1_floor) << ','
               << format_real(r.q2_floor) << ',' << format_real(r.Q_floor) << '\n';
    }
    json manifest = {{"config", to_json(cfg)},
                     {"coefficients", coefficient_metadata(c)},
                     {"t_end", resolve_t_end(cfg.sim, p)},
                     {"steps", res.steps},
                     {"completed", res.completed},
                     {"error", res.error}};
    write_json(dir / "manifest.json", manifest);
    if (!res.completed) {
        std::cerr << "simulation stopped: " << res.error << '\n';
        return 1;
    }
    return 0;
}

int cmd_validate(const RunConfig& cfg, int n, double slack, int jobs) {
    SuiteOptions opt;
    opt.coeff = cfg.coeff;
    opt.slack = slack;
    opt.jobs = jobs;
    if (n > 0) {
        opt.n = n;
        opt.n_master = std::max(n, 8);
    }
    SuiteResult r = run_validation_suite(cfg.params, opt);
    std::cout << to_json(r).dump(2) << '\n';
    return r.pass ? 0 : 1;
}

int cmd_energy(const RunConfig& cfg, const std::string& snapshot_path) {
    const ModelParams& p = cfg.params;
    PeriodicGrid grid = make_grid(cfg);
    Bathymetry bathy = make_bathymetry(grid, cfg.bathymetry);
    CoeffTable c = build_coeffs(grid, p, bathy, cfg.coeff);
    std::ifstream is(snapshot_path);
    if (!is) throw ConfigError("cannot open snapshot file: " + snapshot_path);
    std::string line;
    std::getline(is, line);
    if (line.rfind("t,x,zeta,v", 0) != 0) throw ConfigError("snapshot header must be t,x,zeta,v");
    std::vector<std::pair<double, State>> snaps;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, z, v;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, z, ',');
        std::getline(ss, v, ',');
        double t = std::stod(a);
        if (snaps.empty() || snaps.back().first != t) {
            State s;
            s.t = t;
            snaps.push_back({t, s});
        }
        State& s = snaps.back().second;
        s.zeta.conservativeResize(s.zeta.size() + 1);
        s.v.conservativeResize(s.v.size() + 1);
        s.zeta[s.zeta.size() - 1] = std::stod(z);
        s.v[s.v.size() - 1] = std::stod(v);
    }
    std::cout << "t,Es,Xs\n";
    for (const auto& [t, s] : snaps) {
        if (s.zeta.size() != grid.n())
            throw ConfigError("snapshot at t=" + format_real(t) + " does not match grid.n");
        std::cout << format_real(t) << ','
                  << format_real(energy_Es(grid, s, s, bathy, c, p, cfg.sim.s_energy)) << ','
                  << format_real(xs_norm(grid, s, cfg.sim.s_energy, p.mu)) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-layer Green-Naghdi / Camassa-Holm model with bathymetry"};
    app.require_subcommand(1);
    Common common;

    auto* check = app.add_subcommand("check", "run every hypothesis validator");
    add_common(check, common);

    auto* coeffs = app.add_subcommand("coeffs", "write the coefficient table and residual report");
    add_common(coeffs, common);
    std::string csv_path;
    bool strict = false;
    coeffs->add_option("--csv", csv_path, "table path (default <output_dir>/coeffs.csv)");
    coeffs->add_flag("--strict", strict, "exit 1 when a relation residual fails");

    auto* sim = app.add_subcommand("simulate", "integrate the model and write snapshots");
    add_common(sim, common);

    auto* val = app.add_subcommand("validate", "expansion-order and consistency suite");
    add_common(val, common);
    int vn = 0;
    double slack = 0.0;
    val->add_option("--n", vn, "grid size for the suite");
    val->add_option("--slack", slack, "tolerance subtracted from every order threshold");

    auto* en = app.add_subcommand("energy", "E^s and X^s of saved snapshots");
    add_common(en, common);
    std::string snap_path;
    en->add_option("snapshots", snap_path, "snapshot CSV (t,x,zeta,v)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    RunConfig cfg;
    try {
        cfg = resolve(common);
    } catch (const std::exception& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 2;
    }
    const int jobs = effective_jobs(common.jobs);
    try {
        if (*check) return cmd_check(cfg);
        if (*coeffs) return cmd_coeffs(cfg, csv_path, strict);
        if (*sim) return cmd_simulate(cfg);
        if (*val) return cmd_validate(cfg, vn, slack, jobs);
        if (*en) return cmd_energy(cfg, snap_path);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
