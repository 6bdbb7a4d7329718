#include "strata_gn/grid.hpp"

#include <fftw3.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace strata_gn {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct FftPlans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    explicit FftPlans(int n) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        double* in = fftw_alloc_real(n);
        fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        r2c = fftw_plan_dft_r2c_1d(n, in, out, flags);
        c2r = fftw_plan_dft_c2r_1d(n, out, in, flags | FFTW_DESTROY_INPUT);
        fftw_free(in);
        fftw_free(out);
    }
    ~FftPlans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(r2c);
        fftw_destroy_plan(c2r);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
};

PeriodicGrid::PeriodicGrid(int n, double length) : n_(n), length_(length) {
    if (n < 8 || (n & (n - 1)) != 0)
        throw std::invalid_argument("grid size must be a power of two >= 8");
    if (!(length > 0.0))
        throw std::invalid_argument("grid length must be positive");
    nodes_.resize(n);
    for (int j = 0; j < n; ++j) nodes_[j] = j * (length / n);
    plans_ = std::make_shared<FftPlans>(n);
}

double PeriodicGrid::wavenumber(int k) const {
    return 2.0 * std::numbers::pi * k / length_;
}

CField PeriodicGrid::forward(const Field& f) const {
    check(f);
    Field in = f;
    CField out(n_ / 2 + 1);
    fftw_execute_dft_r2c(plans_->r2c, in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

Field PeriodicGrid::inverse(const CField& fh) const {
    if (fh.size() != n_ / 2 + 1) throw std::invalid_argument("spectrum size mismatch");
    CField in = fh;
    Field out(n_);
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()),
                         out.data());
    return out / n_;
}

Field PeriodicGrid::deriv(const Field& f, int order) const {
    if (order < 1 || order > 4) throw std::invalid_argument("derivative order must be in 1..4");
    CField fh = forward(f);
    const std::complex<double> I(0.0, 1.0);
    for (int k = 0; k <= n_ / 2; ++k) {
        double kk = wavenumber(k);
        // the Nyquist mode has no odd derivative on a real grid
        if (k == n_ / 2 && (order % 2 == 1)) kk = 0.0;
        fh[k] *= std::pow(I * kk, order);
    }
    return inverse(fh);
}

Field PeriodicGrid::bessel_potential(const Field& f, double s) const {
    CField fh = forward(f);
    for (int k = 0; k <= n_ / 2; ++k) {
        double kk = wavenumber(k);
        fh[k] *= std::pow(1.0 + kk * kk, 0.5 * s);
    }
    return inverse(fh);
}

Field PeriodicGrid::dealias(const Field& f) const {
    CField fh = forward(f);
    for (int k = 0; k <= n_ / 2; ++k)
        if (3 * k > n_) fh[k] = 0.0;
    return inverse(fh);
}

double PeriodicGrid::inner(const Field& f, const Field& g) const {
    check(f);
    check(g);
    return dx() * (f * g).sum();
}

double PeriodicGrid::mean(const Field& f) const {
    check(f);
    return f.mean();
}

double PeriodicGrid::sobolev_norm(const Field& f, double s) const {
    CField fh = forward(f);
    double acc = 0.0;
    for (int k = 0; k <= n_ / 2; ++k) {
        double kk = wavenumber(k);
        double w = (k == 0 || 2 * k == n_) ? 1.0 : 2.0;
        acc += w * std::pow(1.0 + kk * kk, s) * std::norm(fh[k]);
    }
    return std::sqrt(acc * length_) / n_;
}

void PeriodicGrid::check(const Field& f) const {
    if (f.size() != n_) throw std::invalid_argument("field does not match grid size");
}

bool PeriodicGrid::same_as(const PeriodicGrid& other) const {
    return n_ == other.n_ && length_ == other.length_;
}

double xs_norm(const PeriodicGrid& grid, const State& u, double s, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("xs_norm requires mu > 0");
    double z = grid.sobolev_norm(u.zeta, s);
    double v = grid.sobolev_norm(u.v, s);
    double vx = grid.sobolev_norm(grid.deriv(u.v), s);
    return std::sqrt(z * z + v * v + mu * vx * vx);
}

double sup_norm(const Field& f) { return f.size() ? f.abs().maxCoeff() : 0.0; }

std::string format_real(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

void write_field_csv(std::ostream& os, const PeriodicGrid& grid, const Field& f) {
    grid.check(f);
    os << "x,value\n";
    for (int j = 0; j < grid.n(); ++j)
        os << format_real(grid.nodes()[j]) << ',' << format_real(f[j]) << '\n';
}

Field read_field_csv(std::istream& is, int expected_n) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty field CSV");
    std::vector<double> vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("malformed CSV row: " + line);
        vals.push_back(std::stod(line.substr(comma + 1)));
    }
    if (expected_n > 0 && static_cast<int>(vals.size()) != expected_n)
        throw std::runtime_error("CSV row count does not match grid size");
    return Eigen::Map<Field>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void write_field_binary(std::ostream& os, const Field& f) {
    std::uint64_t n = static_cast<std::uint64_t>(f.size());
    unsigned char hdr[8];
    for (int i = 0; i < 8; ++i) hdr[i] = static_cast<unsigned char>(n >> (8 * i));
    os.write(reinterpret_cast<const char*>(hdr), 8);
    for (Eigen::Index j = 0; j < f.size(); ++j) {
        std::uint64_t bits;
        double x = f[j];
        std::memcpy(&bits, &x, 8);
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
        os.write(reinterpret_cast<const char*>(b), 8);
    }
}

Field read_field_binary(std::istream& is) {
    unsigned char hdr[8];
    if (!is.read(reinterpret_cast<char*>(hdr), 8)) throw std::runtime_error("truncated binary field");
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(hdr[i]) << (8 * i);
    Field f(static_cast<Eigen::Index>(n));
    for (std::uint64_t j = 0; j < n; ++j) {
        unsigned char b[8];
        if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated binary field");
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        double x;
        std::memcpy(&x, &bits, 8);
        f[static_cast<Eigen::Index>(j)] = x;
    }
    return f;
}

}  // namespace strata_gn
