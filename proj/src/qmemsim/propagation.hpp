#pragma once

#include <vector>

#include "qmemsim/medium.hpp"
#include "qmemsim/types.hpp"

namespace qmemsim {

// Field after traversing depth z of the medium: spectral multiplication by
// the thick transfer function exp(-i b(z)/(w + i/T2)).
Signal propagate(const Medium& m, const Signal& field_in, double z);

// Collective scatterer amplitude versus depth at a fixed observation time.
struct ExcitationProfile {
    std::vector<double> z;
    std::vector<cplx> c;
    double t = 0.0;
};

// Depth grid of roughly n_base points on [0, length], refined 4x over the
// boundary layer at the far end where the profile varies fastest.
std::vector<double> default_z_grid(const Medium& m, std::size_t n_base);

// Spectral-representation evaluation of
//   c(t, z) = sqrt(alpha/(2 T2)) (2 pi)^{-1/2} Integral dw F_in(w) H(w, z)
//             i/(w + i/T2) e^{-i w t},
// summed per frequency mode with a recurrence in z.  A positive band_limit
// restricts |w| to that value (plus an analytic correction for the
// truncated 1/w^2 tail when the input jumps at t = 0); band_limit <= 0
// selects an automatic band giving a few-times-1e-4 relative accuracy.
// Widening the band towards Nyquist does not help: the distant modes of a
// sampled 1/w spectrum are alias-contaminated.  The tau route below is an
// order of magnitude sharper where it applies.
ExcitationProfile atomic_amplitude(const Medium& m, const Signal& field_in,
                                   const std::vector<double>& z, double t,
                                   double band_limit = 0.0);

// Independent route to the same profile via the field gradient,
// c(t, z) = -sqrt(2 T2/alpha) dF(t, z)/dz, with a central finite
// difference of step dz.
ExcitationProfile atomic_amplitude_fd(const Medium& m, const Signal& field_in,
                                      const std::vector<double>& z, double t, double dz);

// Third route through the causal time kernel,
//   c(t, z) = sqrt(alpha/(2 T2)) Integral_0^inf F(t - tau, z) e^{-tau/T2} dtau,
// with F(., z) the propagated field.  t must coincide with an
// integration-cell boundary of the input grid (t = 0 always qualifies on
// default grids), which keeps the quadrature midpoint-exact.
ExcitationProfile atomic_amplitude_tau(const Medium& m, const Signal& field_in,
                                       const std::vector<double>& z, double t);

// Closed-form amplitude profile for the optimal input at t = 0:
//   c(0, z) = -A sqrt(b(L)/L) [1 - pi^{-1/2} e^{-alpha(L - z)/(2 sqrt(alpha L))}].
double atomic_amplitude_closed(const Medium& m, double z);

// Closed-form field at t = 0 inside the medium for the optimal input:
//   F(0, z) = A [-b(z) g(z) e^{-b(L-z) T2/(1 + sqrt(alpha z))}
//              - b(L-z)/2 + b(z)/2].
double field_at_zero_closed(const Medium& m, double z);

// Field inside the medium at depth z (0 < z < length) assembled from the
// four-term decomposition into sub-length responses:
//   F(t,z) = A_L/(A_z A_{L-z}) (gamma_z * F_in^{L-z})(t)
//          + A_L/A_z      gamma(t, z)
//          + A_L/A_{L-z}  F_in^{L-z}(t)
//          - A_L/A_z      F_in^{z}(-t).
Signal field_inside_decomposition(const Medium& m, double z, const TimeGrid& grid,
                                  int m_max = 0);

// Grid-independent quadrature of F(t=0, z) for the optimal input, used as a
// cross-check for the decomposition and the closed form.
double field_at_zero_quadrature(const Medium& m, double z);

}  // namespace qmemsim
