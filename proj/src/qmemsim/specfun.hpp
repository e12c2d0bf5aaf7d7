#pragma once

namespace qmemsim {

// Thin wrappers over well-tested special-function routines, plus the pulse
// shape kernel.  All functions throw std::domain_error on invalid input.

double bessel_j1(double x);

// Exponentially scaled modified Bessel functions: e^{-|x|} I_nu(x).
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

// Modified Bessel function of half-integer order, K_{m - 1/2}(x) for x > 0.
// m may be any integer (K_{-nu} = K_{nu}).
double bessel_k_half(int m, double x);

// phi(u) = J_1(2 sqrt(u)) / sqrt(u), extended to an entire function of u
// (for u < 0 it equals I_1(2 sqrt(-u)) / sqrt(-u)); phi(0) = 1.
double phi_shape(double u);

}  // namespace qmemsim
