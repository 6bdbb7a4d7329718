#include "strata_gn/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace strata_gn {

namespace {

using nlohmann::json;

double bo_from_json(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity" || s == "Infinity") return std::numeric_limits<double>::infinity();
        throw ConfigError("bo must be a number or \"inf\"");
    }
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    return j.get<double>();
}

// reject keys in doc that the defaults do not know about
void check_keys(const json& doc, const json& ref, const std::string& path) {
    if (!doc.is_object()) return;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!ref.contains(it.key())) throw ConfigError("unknown config key: " + key);
        // generator specs are free-form
        if (key == "bathymetry" || key == "initial") continue;
        if (ref[it.key()].is_object()) check_keys(it.value(), ref[it.key()], key);
    }
}

template <class T>
T get(const json& j, const char* key, const std::string& section) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& ex) {
        throw ConfigError(section + "." + key + ": " + ex.what());
    }
}

}  // namespace

json to_json(const ModelParams& p) {
    json j = {{"mu", p.mu},         {"eps", p.eps},           {"delta", p.delta},
              {"gamma", p.gamma},   {"beta", p.beta},         {"M", p.M},
              {"nu0", p.nu0},       {"mu_max", p.mu_max},     {"delta_min", p.delta_min},
              {"delta_max", p.delta_max}, {"bo_min", p.bo_min}, {"beta_max", p.beta_max},
              {"eps_max", p.eps_max}};
    j["bo"] = p.inv_bo == 0.0 ? json("inf") : json(p.bo());
    return j;
}

ModelParams params_from_json(const json& j) {
    ModelParams p;
    const std::string s = "params";
    p.mu = get<double>(j, "mu", s);
    p.eps = get<double>(j, "eps", s);
    p.delta = get<double>(j, "delta", s);
    p.gamma = get<double>(j, "gamma", s);
    p.beta = get<double>(j, "beta", s);
    p.M = get<double>(j, "M", s);
    p.nu0 = get<double>(j, "nu0", s);
    p.mu_max = get<double>(j, "mu_max", s);
    p.delta_min = get<double>(j, "delta_min", s);
    p.delta_max = get<double>(j, "delta_max", s);
    p.bo_min = get<double>(j, "bo_min", s);
    p.beta_max = get<double>(j, "beta_max", s);
    p.eps_max = get<double>(j, "eps_max", s);
    const double bo = bo_from_json(j.at("bo"));
    if (!(bo > 0.0)) throw ConfigError("params.bo must be positive");
    p.set_bo(bo);
    return p;
}

json default_config_json() {
    RunConfig d;
    return to_json(d);
}

json to_json(const RunConfig& c) {
    json j;
    j["params"] = to_json(c.params);
    j["floors"] = {{"h01", c.floors.h01},
                   {"h02", c.floors.h02},
                   {"h03", c.floors.h03},
                   {"h0", c.floors.h0},
                   {"h0_exclusion", c.floors.h0_exclusion}};
    j["coeffs"] = {{"prime_convention", to_string(c.coeff.convention)},
                   {"ode_constant", c.coeff.ode_constant},
                   {"ode_reference_b",
                    c.coeff.ode_reference_b ? json(*c.coeff.ode_reference_b) : json()}};
    j["grid"] = {{"n", c.n}, {"length", c.length}};
    j["bathymetry"] = c.bathymetry;
    j["initial"] = c.initial;
    j["sim"] = {{"cfl", c.sim.cfl},
                {"t_end", c.sim.t_end},
                {"horizon", c.sim.horizon},
                {"dt", c.sim.dt},
                {"snapshot_stride", c.sim.snapshot_stride},
                {"s_energy", c.sim.s_energy},
                {"dealias", c.sim.dealias},
                {"hypothesis_check_stride", c.sim.hypothesis_check_stride}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    json ref = default_config_json();
    check_keys(doc, ref, "");
    json m = ref;
    m.merge_patch(doc);
    // merge_patch deletes keys set to null; keep the optional reference explicit
    if (!m["coeffs"].contains("ode_reference_b")) m["coeffs"]["ode_reference_b"] = nullptr;
    if (doc.contains("bathymetry")) m["bathymetry"] = doc["bathymetry"];
    if (doc.contains("initial")) m["initial"] = doc["initial"];

    RunConfig c;
    c.params = params_from_json(m["params"]);
    const json& f = m["floors"];
    c.floors.h01 = get<double>(f, "h01", "floors");
    c.floors.h02 = get<double>(f, "h02", "floors");
    c.floors.h03 = get<double>(f, "h03", "floors");
    c.floors.h0 = get<double>(f, "h0", "floors");
    c.floors.h0_exclusion = get<double>(f, "h0_exclusion", "floors");
    const json& k = m["coeffs"];
    try {
        c.coeff.convention = prime_convention_from_string(get<std::string>(k, "prime_convention", "coeffs"));
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
    }
    c.coeff.ode_constant = get<double>(k, "ode_constant", "coeffs");
    if (!k["ode_reference_b"].is_null()) c.coeff.ode_reference_b = get<double>(k, "ode_reference_b", "coeffs");
    c.coeff.exclusion_radius = c.floors.h0_exclusion;
    const json& g = m["grid"];
    c.n = get<int>(g, "n", "grid");
    c.length = get<double>(g, "length", "grid");
    if (c.n < 8 || (c.n & (c.n - 1)) != 0) throw ConfigError("grid.n must be a power of two >= 8");
    if (!(c.length > 0.0)) throw ConfigError("grid.length must be positive");
    c.bathymetry = m["bathymetry"];
    c.initial = m["initial"];
    if (!c.bathymetry.is_object() || !c.initial.is_object())
        throw ConfigError("bathymetry and initial must be objects");
    const json& s = m["sim"];
    c.sim.cfl = get<double>(s, "cfl", "sim");
    c.sim.t_end = get<double>(s, "t_end", "sim");
    c.sim.horizon = get<double>(s, "horizon", "sim");
    c.sim.dt = get<double>(s, "dt", "sim");
    c.sim.snapshot_stride = get<int>(s, "snapshot_stride", "sim");
    c.sim.s_energy = get<double>(s, "s_energy", "sim");
    c.sim.dealias = get<bool>(s, "dealias", "sim");
    c.sim.hypothesis_check_stride = get<int>(s, "hypothesis_check_stride", "sim");
    try {
        validate(c.sim);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("sim: ") + ex.what());
    }
    c.output_dir = get<std::string>(m, "output_dir", "");
    c.seed = get<std::uint64_t>(m, "seed", "");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& ex) {
        throw ConfigError(path + ": " + ex.what());
    }
    return parse_config(doc);
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &doc;
    size_t start = 0;
    while (true) {
        const size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw ConfigError("empty key in override: " + path);
        if (!node->is_object()) *node = json::object();
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

PeriodicGrid make_grid(const RunConfig& cfg) { return PeriodicGrid(cfg.n, cfg.length); }

Bathymetry make_bathymetry(const PeriodicGrid& grid, const json& spec) {
    const std::string type = spec.value("type", "flat");
    if (type == "csv") {
        const std::string path = spec.value("path", "");
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open bathymetry file: " + path);
        Bathymetry b = Bathymetry::from_values(grid, read_field_csv(is, grid.n()));
        b.generator = "csv";
        b.generator_params = spec;
        return b;
    }
    try {
        return Bathymetry::from_spec(grid, spec);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
    }
}

State make_initial(const PeriodicGrid& grid, const json& spec, const ModelParams& p) {
    const std::string type = spec.value("type", "zero");
    const int n = grid.n();
    const Field& x = grid.nodes();
    const double L = grid.length();
    State u;
    u.zeta = Field::Zero(n);
    u.v = Field::Zero(n);
    if (type == "zero") return u;
    if (type == "gaussian") {
        const double a = spec.value("amplitude", 0.5);
        const double x0 = spec.value("center", 0.5 * L);
        const double w = spec.value("width", 1.0);
        if (!(w > 0.0)) throw ConfigError("initial.width must be positive");
        for (int j = 0; j < n; ++j) {
            double d = std::remainder(x[j] - x0, L);
            u.zeta[j] = a * std::exp(-d * d / (w * w));
        }
        return u;
    }
    if (type == "mode") {
        // right-going linear mode of the flat, beta = 0 system
        const double a = spec.value("amplitude", 1e-4);
        const int k = spec.value("wavenumber", 1);
        const double kk = 2.0 * std::numbers::pi * k / L;
        const double h1 = 1.0, h2 = 1.0 / p.delta;
        const double H0 = h1 * h2 / (h1 + p.gamma * h2);
        const double nu = (1.0 + p.gamma * p.delta) / (3.0 * p.delta * (p.gamma + p.delta)) - p.inv_bo;
        const double om = kk * std::sqrt((p.gamma + p.delta) * H0 / (1.0 + p.mu * nu * kk * kk));
        u.zeta = a * (kk * x).cos();
        u.v = (a * om / (kk * H0)) * (kk * x).cos();
        return u;
    }
    if (type == "csv") {
        auto load = [&](const char* key) {
            const std::string path = spec.value(key, "");
            std::ifstream is(path);
            if (!is) throw ConfigError(std::string("cannot open initial.") + key + " file: " + path);
            return read_field_csv(is, n);
        };
        u.zeta = load("zeta");
        if (spec.contains("v")) u.v = load("v");
        return u;
    }
    throw ConfigError("unknown initial type: " + type);
}

}  // namespace strata_gn
