#pragma once

#include <cstddef>

#include "qmemsim/medium.hpp"
#include "qmemsim/propagation.hpp"
#include "qmemsim/types.hpp"

namespace qmemsim {

// Storage efficiency of a full pass:
//   E = [P_out(t > 0) - P_out(t < 0)] / P_in(t < 0).
double efficiency(const Signal& field_in, const Signal& field_out);

// Large-depth asymptote E = 1 - 4 / sqrt(pi alpha L).
double efficiency_asymptotic(const Medium& m);

// Probability stored in the scatterers at t = 0: Integral_0^L |c(0,z)|^2 dz
// (trapezoidal over the profile's z grid), and its closed-form counterpart
// p = 1 - 2/sqrt(pi alpha L) + 1/(pi sqrt(alpha L)).
double absorption_probability(const ExcitationProfile& profile);
double absorption_probability_closed(const Medium& m);

struct FirstBurstResult {
    double fraction = 0.0;     // P([0, t_end]) / P(t > 0)
    double t_end = 0.0;        // first zero crossing after the retrieved peak
    bool no_crossing = false;  // no crossing found: fraction covers all t > 0
};

// Fraction of the retrieved (t > 0) probability contained in the first
// oscillation lobe of the output field (from t = 0 to the first zero
// crossing after the global post-zero peak).
FirstBurstResult first_burst_fraction(const Signal& field_out);

struct FlatnessResult {
    double plateau_median = 0.0;  // median |c| over z <= 0.8 L
    double dip_depth = 0.0;       // plateau_median - |c(L)|
    double width = 0.0;           // half-depth width of the far-end dip
    double cv = 0.0;              // std/mean of |c| outside the dip
    double expected_width = 0.0;  // 2 ln 2 / sqrt(alpha L) * L
};

// Flatness measures of the excitation profile |c(0, z)|: how uniform the
// stored excitation is, and the size of the boundary layer at the far end.
FlatnessResult flatness_metrics(const ExcitationProfile& profile, const Medium& m);

// Everything the CLI reports for one medium, computed from the optimal
// input on the given grid (grid.n == 0 selects default_grid).
struct MetricsReport {
    double depth = 0.0;
    double input_probability = 0.0;
    double efficiency = 0.0;
    double efficiency_asymptotic = 0.0;
    double leak_before_zero = 0.0;
    double retrieved_after_zero = 0.0;
    double p_abs = 0.0;
    double p_abs_closed = 0.0;
    double first_burst_fraction = 0.0;
    double first_burst_t_end = 0.0;
    double peak_density = 0.0;  // max |F_out|^2 over t > 0
    double peak_time = 0.0;
    double flatness_cv = 0.0;
    double boundary_layer_width = 0.0;
    double boundary_layer_expected = 0.0;
    double plateau_median = 0.0;
    double dip_depth = 0.0;
};

MetricsReport compute_metrics(const Medium& m, TimeGrid grid = TimeGrid{},
                              std::size_t z_points = 512);

// Same report for a caller-supplied input signal (grid taken from the
// signal); the optimal-input variant above delegates here.
MetricsReport compute_metrics_for_input(const Medium& m, const Signal& f_in,
                                        std::size_t z_points = 512);

}  // namespace qmemsim
