#pragma once

#include <complex>
#include <cstddef>

#include "qmemsim/types.hpp"

namespace qmemsim {

// Homogeneously broadened resonant absorber of length `length`, resonant
// absorption coefficient `alpha` (inverse length) and coherence time `t2`.
// Validated by make_medium; optical depth alpha*length is the single
// dimensionless knob of the model.
struct Medium {
    double alpha = 0.0;
    double length = 0.0;
    double t2 = 1.0;

    double depth() const { return alpha * length; }
};

Medium make_medium(double alpha, double length, double t2);

// b(z) = alpha z / (2 T2): bandwidth-like rate accumulated over depth z.
double b_of(const Medium& m, double z);

// g(z) = e^{-alpha z/2} [I0(alpha z/2) + I1(alpha z/2)], evaluated with
// scaled Bessel functions so it stays accurate at large depth.
double g_of(const Medium& m, double z);

// Same quantity as a function of optical depth d = alpha z alone.
double g_factor_from_depth(double depth);

// 1 - g(d), via a power series at small depth where direct subtraction
// loses precision.
double one_minus_g_from_depth(double depth);

// Normalization constant of the optimal input pulse,
// A(L) = 1 / sqrt(b(L) (1 - g(L))).
double norm_const(const Medium& m);

// Single-pass transfer functions at detuning w:
//   thin slice of thickness dz:  1 - i b(dz) / (w + i/T2)
//   full thickness z:            exp(-i b(z) / (w + i/T2))
cplx transfer_thin(const Medium& m, double dz, double w);
cplx transfer_thick(const Medium& m, double z, double w);

// Regular (non-singular) part of the propagation kernel over depth z:
//   Phi(t, z) = b(z) phi(b(z) t) e^{-t/T2} theta(t),
// so that the full pass acts as F_out = F_in - (Phi * F_in).
// theta(0) = 1/2, so the exact-t = 0 sample is b(z)/2; the one-sided limit
// Phi(0+) is b(z).
double impulse_response_regular(const Medium& m, double z, double t);

// Geometrical coupling factor of a single scatterer, mu = 3 lambda^2/(8 pi S)
// for wavelength lambda and beam cross-section S.
double mu_geometric(double wavelength, double beam_area);

// Resonant absorption coefficient from slice microphysics:
// alpha = 4 mu N/dz for linear scatterer density N/dz.
double alpha_from_geometry(double mu, double linear_density);

// Simulation grid sized for the medium: spacing T2 / (32 max(depth, 4)),
// window [-20 T2, 20 T2] rounded up to a power-of-two sample count, samples
// staggered half a step off t = 0.
TimeGrid default_grid(const Medium& m);

}  // namespace qmemsim
