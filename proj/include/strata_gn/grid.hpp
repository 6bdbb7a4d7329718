#pragma once

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace strata_gn {

using Field = Eigen::ArrayXd;
using CField = Eigen::ArrayXcd;

struct FftPlans;

// Uniform periodic grid on [0, length) with Fourier-collocation operators.
class PeriodicGrid {
public:
    PeriodicGrid(int n, double length);

    int n() const { return n_; }
    double length() const { return length_; }
    double dx() const { return length_ / n_; }
    const Field& nodes() const { return nodes_; }
    // angular wavenumber of the k-th half-spectrum coefficient
    double wavenumber(int k) const;

    CField forward(const Field& f) const;
    Field inverse(const CField& fh) const;

    Field deriv(const Field& f, int order = 1) const;
    Field bessel_potential(const Field& f, double s) const;
    // zeroes every mode with |k| > n/3
    Field dealias(const Field& f) const;

    double inner(const Field& f, const Field& g) const;
    double mean(const Field& f) const;
    double sobolev_norm(const Field& f, double s) const;

    void check(const Field& f) const;
    bool same_as(const PeriodicGrid& other) const;

private:
    int n_;
    double length_;
    Field nodes_;
    std::shared_ptr<FftPlans> plans_;
};

struct State {
    Field zeta;
    Field v;
    double t = 0.0;
};

double xs_norm(const PeriodicGrid& grid, const State& u, double s, double mu);

double sup_norm(const Field& f);

void write_field_csv(std::ostream& os, const PeriodicGrid& grid, const Field& f);
Field read_field_csv(std::istream& is, int expected_n);
void write_field_binary(std::ostream& os, const Field& f);
Field read_field_binary(std::istream& is);

// shortest round-trip decimal form
std::string format_real(double x);

}  // namespace strata_gn
