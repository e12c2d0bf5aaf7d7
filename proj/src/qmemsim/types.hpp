#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qmemsim {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Inconsistent grid/window configuration (distinct from mathematical domain
// errors so callers can map it to a configuration failure).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform time grid.  Samples sit at t_k = t_start + k * dt for k = 0..n-1.
// Grids produced by make_centered_grid stagger the samples half a step off
// the origin so that no sample falls on t = 0; integration cells then have
// t = 0 as an exact cell boundary, which keeps one-sided probabilities of
// discontinuous pulses quadrature-exact to second order.
struct TimeGrid {
    double t_start = 0.0;
    double dt = 0.0;
    std::size_t n = 0;

    double t(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
    double t_end() const { return t(n == 0 ? 0 : n - 1); }

    bool operator==(const TimeGrid&) const = default;
};

// Complex-valued sampled signal on a uniform time grid.
struct Signal {
    TimeGrid grid;
    std::vector<cplx> samples;

    std::size_t size() const { return samples.size(); }
};

// Spectrum produced by forward_transform.  Frequency samples sit at
// w_k = w_start + k * dw with dw = 2*pi / (n * dt); w_start = -pi / dt.
// The originating time grid is retained so inverse_transform can restore
// the signal exactly.
struct Spectrum {
    double w_start = 0.0;
    double dw = 0.0;
    double t_start = 0.0;  // t_start of the originating time grid
    double dt = 0.0;
    std::vector<cplx> samples;

    std::size_t size() const { return samples.size(); }
    double w(std::size_t k) const { return w_start + static_cast<double>(k) * dw; }
};

// Builds a grid of n samples, spacing dt, centred on t = 0 with samples at
// (k + 1/2 - n/2) * dt.  For even n this places cell boundaries exactly at
// t = 0; n must be positive and even.
inline TimeGrid make_centered_grid(std::size_t n, double dt) {
    if (n == 0 || n % 2 != 0) {
        throw std::invalid_argument("make_centered_grid: n must be positive and even");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("make_centered_grid: dt must be positive");
    }
    TimeGrid g;
    g.dt = dt;
    g.n = n;
    g.t_start = (0.5 - 0.5 * static_cast<double>(n)) * dt;
    return g;
}

}  // namespace qmemsim
