#pragma once

#include "strata_gn/coeffs.hpp"
#include "strata_gn/gn_ref.hpp"
#include "strata_gn/grid.hpp"
#include "strata_gn/operator_t.hpp"
#include "strata_gn/params.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata_gn {

struct SimConfig {
    double cfl = 0.4;
    double t_end = 0.0;       // <= 0 means horizon / max(eps, beta)
    double horizon = 1.0;
    double dt = 0.0;          // > 0 forces a fixed step
    int snapshot_stride = 10;
    double s_energy = 2.0;
    bool dealias = true;
    int hypothesis_check_stride = 1;
};

void validate(const SimConfig& cfg);
double resolve_t_end(const SimConfig& cfg, const ModelParams& p);

struct Fluxes {
    Field H, Hp, G;
};

Fluxes flux_functions(const State& u, const Bathymetry& bathy, const ModelParams& p);

// assembly of the elliptic operator, rebuilt only when zeta changes
class TCache {
public:
    const TOperatorAssembly& get(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                                 const CoeffTable& c, const ModelParams& p);
    int assemblies() const { return assemblies_; }

private:
    std::optional<TOperatorAssembly> op_;
    int assemblies_ = 0;
};

struct Tendency {
    Field dzeta, dv;
};

Tendency rhs(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
             const CoeffTable& c, const ModelParams& p, TCache& cache, bool dealias = false);

class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& what, int stage) : std::runtime_error(what), stage(stage) {}
    int stage;
};

State step_rk4(const PeriodicGrid& grid, const State& u, double dt, const Bathymetry& bathy,
               const CoeffTable& c, const ModelParams& p, TCache& cache, bool dealias = false);

double cfl_dt(const State& u, const Bathymetry& bathy, const ModelParams& p,
              const PeriodicGrid& grid, double cfl);

double mass(const PeriodicGrid& grid, const Field& zeta);

// (Q0 + eps^2 Q1) / H evaluated at the frozen state
Field symmetrizer_weight(const State& ref, const Bathymetry& bathy, const CoeffTable& c,
                         const ModelParams& p);

// E^s(u) with Z frozen at ref
double energy_Es(const PeriodicGrid& grid, const State& u, const State& ref,
                 const Bathymetry& bathy, const CoeffTable& c, const ModelParams& p, double s);
// bilinear form behind energy_Es
double energy_form(const PeriodicGrid& grid, const State& u1, const State& u2, const State& ref,
                   const Bathymetry& bathy, const CoeffTable& c, const ModelParams& p, double s);

struct EquivalenceConstant {
    double lower = 0.0;  // E^2 >= lower |U|^2_{X^s}
    double upper = 0.0;  // E^2 <= upper |U|^2_{X^s}
    double c0 = 0.0;
};

EquivalenceConstant energy_equivalence_constant(const PeriodicGrid& grid, const State& ref,
                                                const Bathymetry& bathy, const CoeffTable& c,
                                                const ModelParams& p);

struct DiagnosticsRow {
    double t, mass, Es, Xs, h1_floor, h2_floor, q1_floor, q2_floor, Q_floor;
};

struct SimResult {
    std::vector<State> snapshots;
    std::vector<DiagnosticsRow> log;
    bool completed = false;
    std::string error;
    State last_valid;
    int steps = 0;
};

SimResult simulate(const PeriodicGrid& grid, const State& initial, const Bathymetry& bathy,
                   const CoeffTable& c, const ModelParams& p, const SimConfig& cfg,
                   const Floors& floors = {});

// sup | q1 * residual | of the consistency identity with dt v taken from the model
double derivation_residual(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                           const CoeffTable& c, const ModelParams& p);

// eps over eps_sequence, mu = (eps / M)^2, order measured in mu
OrderReport master_test(const Probe& probe, const ModelParams& p,
                        const std::vector<double>& eps_sequence, const CoeffOptions& opt = {},
                        double threshold = 1.8);

}  // namespace strata_gn
