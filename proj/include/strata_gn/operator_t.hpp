#pragma once

#include "strata_gn/coeffs.hpp"
#include "strata_gn/grid.hpp"
#include "strata_gn/params.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>

namespace strata_gn {

// Periodic tridiagonal discretisation of
//   T V = z V - mu d/dx( a dV/dx ),  z = q1 + mu eps beta kappa0 zeta_x b_x,  a = nu q2.
// Row i reads sub[i] V[i-1] + diag[i] V[i] + sup[i] V[i+1] (indices mod n);
// symmetry means sub[i+1] == sup[i].
struct TOperatorAssembly {
    int n = 0;
    double dx = 0.0;
    double mu = 0.0;
    Field diag, sub, sup;
    Field zeroth;   // z
    Field a_half;   // a at i+1/2
    std::uint64_t state_hash = 0;
    std::uint64_t coeff_hash = 0;
};

class OperatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t hash_field(const Field& f, std::uint64_t seed = 1469598103934665603ull);

// direct assembly from the zeroth-order field and the node values of a
TOperatorAssembly assemble_raw(const PeriodicGrid& grid, const Field& zeroth, const Field& a,
                               double mu);
TOperatorAssembly assemble(const PeriodicGrid& grid, const State& u, const Bathymetry& bathy,
                           const CoeffTable& c, const ModelParams& p);

Field apply(const TOperatorAssembly& op, const Field& v);
Field solve(const TOperatorAssembly& op, const Field& rhs);

// discrete H^1_mu norm squared: dx * sum( v^2 + mu (D+ v)^2 )
double h1mu_norm_sq(const TOperatorAssembly& op, const Field& v);

struct RayleighOptions {
    int trials = 8;
    int inverse_iterations = 40;
    std::uint64_t seed = 7;
    // exact generalized eigenvalue solve up to this size
    int dense_limit = 512;
};

// min of (T v, v) / |v|^2_{H^1_mu}: smallest eigenvalue of the pencil (T, I - mu D-D+),
// dense for small n, otherwise random trials refined by inverse iteration
double rayleigh_floor(const TOperatorAssembly& op, const RayleighOptions& opt = {});

// continuity constant max(sup|z|, sup|a|) for the discrete bilinear form
double continuity_constant(const TOperatorAssembly& op);

void dump_csv(std::ostream& os, const TOperatorAssembly& op);

// periodic tridiagonal solve by Sherman-Morrison on the corner entries
Field solve_periodic_tridiagonal(const Field& sub, const Field& diag, const Field& sup,
                                 const Field& rhs);

}  // namespace strata_gn
