#include "qmemsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qmemsim/pulse.hpp"
#include "qmemsim/signal_ops.hpp"

namespace qmemsim {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double efficiency(const Signal& field_in, const Signal& field_out) {
    const double p_in = probability(field_in, -inf, 0.0).value;
    if (!(p_in > 0.0)) throw std::domain_error("efficiency: input carries no probability at t < 0");
    const double p_after = probability(field_out, 0.0, inf).value;
    const double p_before = probability(field_out, -inf, 0.0).value;
    return (p_after - p_before) / p_in;
}

double efficiency_asymptotic(const Medium& m) {
    return 1.0 - 4.0 / std::sqrt(pi * m.depth());
}

double absorption_probability(const ExcitationProfile& profile) {
    if (profile.z.size() < 2) throw std::invalid_argument("absorption_probability: need >= 2 z points");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < profile.z.size(); ++i) {
        const double w = profile.z[i + 1] - profile.z[i];
        acc += 0.5 * w * (std::norm(profile.c[i]) + std::norm(profile.c[i + 1]));
    }
    return acc;
}

double absorption_probability_closed(const Medium& m) {
    const double rd = std::sqrt(m.depth());
    return 1.0 - 2.0 / (std::sqrt(pi) * rd) + 1.0 / (pi * rd);
}

FirstBurstResult first_burst_fraction(const Signal& field_out) {
    const TimeGrid& g = field_out.grid;
    FirstBurstResult r;

    // Global peak of |F| over t > 0.
    std::size_t k_peak = 0;
    double peak = -1.0;
    bool any = false;
    for (std::size_t k = 0; k < g.n; ++k) {
        if (g.t(k) <= 0.0) continue;
        const double a = std::abs(field_out.samples[k]);
        if (a > peak) {
            peak = a;
            k_peak = k;
            any = true;
        }
    }
    if (!any || !(peak > 0.0)) {
        r.no_crossing = true;
        return r;
    }

    // First sign change of the real part after the peak; the burst boundary
    // is the integration-cell edge between the two samples.
    bool crossed = false;
    for (std::size_t k = k_peak; k + 1 < g.n; ++k) {
        const double a = field_out.samples[k].real();
        const double b = field_out.samples[k + 1].real();
        if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) {
            r.t_end = g.t(k) + 0.5 * g.dt;
            crossed = true;
            break;
        }
    }

    const double p_total = probability(field_out, 0.0, inf).value;
    if (!(p_total > 0.0)) {
        r.no_crossing = true;
        return r;
    }
    if (!crossed) {
        // Single-lobe output: the whole t > 0 window is the burst.
        r.no_crossing = true;
        r.t_end = g.t_end() + 0.5 * g.dt;
        r.fraction = 1.0;
        return r;
    }
    r.fraction = probability(field_out, 0.0, r.t_end).value / p_total;
    return r;
}

FlatnessResult flatness_metrics(const ExcitationProfile& profile, const Medium& m) {
    const std::size_t n = profile.z.size();
    if (n < 8) throw std::invalid_argument("flatness_metrics: profile too coarse");
    const double L = m.length;

    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(profile.c[i]);

    FlatnessResult r;
    r.expected_width = 2.0 * std::log(2.0) / std::sqrt(m.depth()) * L;

    std::vector<double> plateau;
    for (std::size_t i = 0; i < n; ++i) {
        if (profile.z[i] <= 0.8 * L) plateau.push_back(mag[i]);
    }
    r.plateau_median = median(plateau);
    r.dip_depth = r.plateau_median - mag[n - 1];

    // Scan from the far end for the last depth at which the profile is
    // still above the half-depth threshold; everything beyond is the dip.
    const double threshold = r.plateau_median - 0.5 * r.dip_depth;
    double z_edge = L;
    for (std::size_t i = n; i-- > 0;) {
        if (mag[i] >= threshold) {
            z_edge = profile.z[i];
            break;
        }
    }
    r.width = L - z_edge;

    // Variability of the flat region.
    double s1 = 0.0, s2 = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (profile.z[i] <= L - r.width) {
            s1 += mag[i];
            s2 += mag[i] * mag[i];
            ++cnt;
        }
    }
    if (cnt > 1) {
        const double mean = s1 / static_cast<double>(cnt);
        const double var = std::max(s2 / static_cast<double>(cnt) - mean * mean, 0.0);
        r.cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    }
    return r;
}

MetricsReport compute_metrics_for_input(const Medium& m, const Signal& f_in,
                                        std::size_t z_points) {
    if (z_points < 16) throw std::invalid_argument("compute_metrics: z_points too small");
    const TimeGrid& grid = f_in.grid;
    if (grid.n == 0 || !(grid.dt > 0.0)) {
        throw std::invalid_argument("compute_metrics: input signal has no grid");
    }

    const Signal f_out = propagate(m, f_in, m.length);
    const auto zg = default_z_grid(m, z_points);
    const ExcitationProfile prof = atomic_amplitude(m, f_in, zg, 0.0);

    MetricsReport r;
    r.depth = m.depth();
    r.input_probability = probability(f_in, -inf, inf).value;
    r.efficiency = efficiency(f_in, f_out);
    r.efficiency_asymptotic = efficiency_asymptotic(m);
    r.leak_before_zero = probability(f_out, -inf, 0.0).value;
    r.retrieved_after_zero = probability(f_out, 0.0, inf).value;
    r.p_abs = absorption_probability(prof);
    r.p_abs_closed = absorption_probability_closed(m);

    const FirstBurstResult fb = first_burst_fraction(f_out);
    r.first_burst_fraction = fb.fraction;
    r.first_burst_t_end = fb.t_end;

    for (std::size_t k = 0; k < grid.n; ++k) {
        if (grid.t(k) <= 0.0) continue;
        const double d = std::norm(f_out.samples[k]);
        if (d > r.peak_density) {
            r.peak_density = d;
            r.peak_time = grid.t(k);
        }
    }

    const FlatnessResult fl = flatness_metrics(prof, m);
    r.flatness_cv = fl.cv;
    r.boundary_layer_width = fl.width;
    r.boundary_layer_expected = fl.expected_width;
    r.plateau_median = fl.plateau_median;
    r.dip_depth = fl.dip_depth;
    return r;
}

MetricsReport compute_metrics(const Medium& m, TimeGrid grid, std::size_t z_points) {
    if (grid.n == 0) grid = default_grid(m);
    return compute_metrics_for_input(m, build_optimal(m, grid), z_points);
}

}  // namespace qmemsim
