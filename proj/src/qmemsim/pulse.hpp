#pragma once

#include "qmemsim/medium.hpp"
#include "qmemsim/types.hpp"

namespace qmemsim {

// Optimal (matched-filter) input pulse for full retrieval analysis:
//   F_in(t) = -A(L) Phi(-t, L),
// i.e. the time reverse of the medium's regular impulse response, scaled so
// that Integral |F_in|^2 dt = 1.  Supported on t < 0.
Signal build_optimal(const Medium& m, const TimeGrid& grid);

struct GammaSeriesResult {
    double value = 0.0;
    int terms_used = 0;
    bool truncated = false;      // hit the term cap before converging
    double achieved_digits = 0;  // decimal digits surviving cancellation
};

// Backscattered response kernel gamma(t, L): the inverse transform of
// (A/sqrt(2 pi)) (H(w, L) H(-w, L) - 1), an even function of t evaluated by
// its half-integer-Bessel series.  The series terms alternate in sign and
// grow combinatorially before decaying, so the sum cancels catastrophically
// at large optical depth; it is evaluated in arbitrary-precision arithmetic
// with the working precision chosen from the measured cancellation and
// verified after the fact.  m_max <= 0 selects an automatic term cap.
GammaSeriesResult gamma_series(const Medium& m, double t, int m_max = 0);

// gamma evaluated on every grid point (exploits evenness in t).
Signal gamma_grid(const Medium& m, const TimeGrid& grid, int m_max = 0);

// Large-depth asymptotic form:
//   gamma(t) ~ -sqrt(b(L)) g(L) / sqrt(1 - g(L)) e^{-|t| sqrt(alpha L)/T2}.
double gamma_asymptotic(const Medium& m, double t);

// Closed forms for cross-checking the series: value at t = 0 and total
// energy Integral gamma^2 dt.
double gamma_at_zero_closed(const Medium& m);
double gamma_energy_closed(const Medium& m);

// Analytic output field for the optimal input:
//   F_out(t) = gamma(t, L) - F_in(-t),
// i.e. gamma(t) for t < 0 and gamma(t) + A Phi(t, L) for t > 0.
Signal analytic_output(const Medium& m, const TimeGrid& grid, int m_max = 0);

}  // namespace qmemsim
