#pragma once

#include "qmemsim/medium.hpp"
#include "qmemsim/types.hpp"

namespace qmemsim {

// One optically thin slice: np_mu is the product of scatterer number and
// single-scatterer coupling (N mu, dimensionless); t1 the population decay
// time.  Relation to the bulk medium: N mu = alpha dz/4 and T2 = 2 T1.
struct SliceParams {
    double np_mu = 0.0;
    double t1 = 1.0;
};

SliceParams make_slice(double np_mu, double t1);

// Collective excitation amplitude trace on the input's grid.
using SliceState = Signal;

// Driven collective mode amplitude:
//   c(t) = c_init e^{-(N mu + 1)(t - t_first)/(2 t1)}
//        - sqrt(N mu / t1) Integral_0^inf F_in(t - tau)
//            e^{-(N mu + 1) tau/(2 t1)} dtau,
// with c_init the amplitude at the first grid sample.
SliceState slice_excitation(const Signal& field_in, const SliceParams& sp,
                            cplx c_init = cplx{0.0, 0.0});

// Field leaving the slice: F_out(t) = F_in(t) + sqrt(N mu / t1) c(t).
Signal slice_output(const Signal& field_in, const SliceState& state, const SliceParams& sp);

// Weak-excitation limit of a slice of thickness dz of the bulk medium:
//   F_out(t) = F_in(t) - b(dz) Integral_0^inf F_in(t - tau) e^{-tau/T2} dtau.
Signal thin_scatter(const Signal& field_in, const Medium& m, double dz);

// n_slices successive applications of thin_scatter with dz = length/n_slices.
Signal cascade(const Signal& field_in, const Medium& m, std::size_t n_slices);

}  // namespace qmemsim
