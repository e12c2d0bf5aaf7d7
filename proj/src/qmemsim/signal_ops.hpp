#pragma once

#include "qmemsim/types.hpp"

namespace qmemsim {

// Discrete approximation of the unitary Fourier pair
//   F(w) = (2 pi)^{-1/2} Integral f(t) e^{+i w t} dt,
//   f(t) = (2 pi)^{-1/2} Integral F(w) e^{-i w t} dw.
// Frequencies run over w_j = -pi/dt + j * 2 pi/(n dt); the pair is an exact
// mutual inverse on the grid and satisfies the discrete Parseval identity
// sum |f_k|^2 dt = sum |F_j|^2 dw.
Spectrum forward_transform(const Signal& s);
Signal inverse_transform(const Spectrum& sp);

// Linear convolution (f * g)(t) = Integral f(tau) g(t - tau) dtau evaluated
// by FFT; both inputs must share the same dt.  The result has
// n_f + n_g - 1 samples starting at f.t_start + g.t_start.
Signal convolve(const Signal& f, const Signal& g);

struct ProbabilityResult {
    double value = 0.0;    // sum over enclosed cells of |f_k|^2 dt
    double lo_used = 0.0;  // requested bounds snapped to cell boundaries
    double hi_used = 0.0;
    bool empty = false;    // true if the snapped window contains no cell
};

// Integral of |f|^2 over [t_lo, t_hi] by the midpoint rule.  Bounds snap to
// the nearest integration-cell boundary (cells are [t_k - dt/2, t_k + dt/2]);
// pass +-infinity for one-sided or total probabilities.
ProbabilityResult probability(const Signal& s, double t_lo, double t_hi);

// f(t) -> f(-t).  On a grid centred about t = 0 the grid is unchanged.
Signal time_reverse(const Signal& s);

}  // namespace qmemsim
