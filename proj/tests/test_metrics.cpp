// Storage metrics: efficiency, absorbed probability, first-burst fraction,
// profile flatness, and the aggregated per-medium report.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qmemsim/medium.hpp"
#include "qmemsim/metrics.hpp"
#include "qmemsim/propagation.hpp"
#include "qmemsim/pulse.hpp"
#include "qmemsim/signal_ops.hpp"

using namespace qmemsim;

namespace {

Signal flat_signal(const TimeGrid& g, cplx value) {
    Signal s;
    s.grid = g;
    s.samples.assign(g.n, value);
    return s;
}

}  // namespace

TEST_CASE("efficiency on hand-built signals is exact") {
    const TimeGrid g = make_centered_grid(8, 1.0);  // t = -3.5 ... 3.5
    Signal in = flat_signal(g, cplx{0.0, 0.0});
    Signal out = flat_signal(g, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < 4; ++k) in.samples[k] = 1.0;        // P_in(t<0) = 4
    for (std::size_t k = 0; k < 4; ++k) out.samples[k] = 0.25;      // P_out(t<0) = 0.25
    for (std::size_t k = 4; k < 8; ++k) out.samples[k] = 0.5;       // P_out(t>0) = 1.0
    CHECK(efficiency(in, out) == (1.0 - 0.25) / 4.0);

    const Signal empty_in = flat_signal(g, cplx{0.0, 0.0});
    CHECK_THROWS_AS((void)efficiency(empty_in, out), std::domain_error);
}

TEST_CASE("asymptotic efficiency pins") {
    CHECK(efficiency_asymptotic(make_medium(10.0, 1.0, 1.0)) ==
          doctest::Approx(0.2863503535388916).epsilon(1e-14));
    CHECK(efficiency_asymptotic(make_medium(100.0, 1.0, 1.0)) ==
          doctest::Approx(0.7743241665808975).epsilon(1e-14));
    CHECK(efficiency_asymptotic(make_medium(1000.0, 1.0, 1.0)) ==
          doctest::Approx(0.9286350353538891).epsilon(1e-14));
}

TEST_CASE("absorbed probability is an exact trapezoid") {
    ExcitationProfile p;
    p.z = {0.0, 0.1, 0.3, 0.35, 0.7, 1.0};
    p.c.assign(p.z.size(), cplx{0.0, 0.8});
    CHECK(absorption_probability(p) == doctest::Approx(0.64).epsilon(1e-14));

    ExcitationProfile lin;
    const std::size_t n = 1001;
    lin.z.resize(n);
    lin.c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        lin.z[i] = static_cast<double>(i) / static_cast<double>(n - 1);
        lin.c[i] = lin.z[i];
    }
    CHECK(absorption_probability(lin) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

    ExcitationProfile tiny;
    tiny.z = {0.5};
    tiny.c = {cplx{1.0, 0.0}};
    CHECK_THROWS_AS((void)absorption_probability(tiny), std::invalid_argument);
}

TEST_CASE("closed-form absorbed probability pins") {
    for (const auto& row : oracles::medium_rows) {
        CAPTURE(row.depth);
        const Medium m = make_medium(row.depth, 1.0, 1.0);
        CHECK(absorption_probability_closed(m) == doctest::Approx(row.p_abs).epsilon(1e-7));
    }
}

TEST_CASE("first burst on a hand-built output") {
    const TimeGrid g = make_centered_grid(16, 0.5);  // t = -3.75 ... 3.75
    Signal out = flat_signal(g, cplx{0.0, 0.0});
    out.samples[8] = 0.1;    // t = 0.25
    out.samples[9] = 1.0;    // t = 0.75, the peak
    out.samples[10] = 0.5;   // t = 1.25
    out.samples[11] = -0.2;  // crossing between 1.25 and 1.75 -> t_end = 1.5
    out.samples[12] = -0.1;

    const FirstBurstResult r = first_burst_fraction(out);
    CHECK(!r.no_crossing);
    CHECK(r.t_end == doctest::Approx(1.5).epsilon(1e-12));
    const double p_burst = 0.5 * (0.01 + 1.0 + 0.25);
    const double p_total = p_burst + 0.5 * (0.04 + 0.01);
    CHECK(r.fraction == doctest::Approx(p_burst / p_total).epsilon(1e-12));
}

TEST_CASE("first burst degenerate cases") {
    const TimeGrid g = make_centered_grid(16, 0.5);

    Signal single_lobe = flat_signal(g, cplx{0.0, 0.0});
    for (std::size_t k = 8; k < 16; ++k) single_lobe.samples[k] = 0.3;
    const FirstBurstResult lobe = first_burst_fraction(single_lobe);
    CHECK(lobe.no_crossing);
    CHECK(lobe.fraction == 1.0);

    Signal silent = flat_signal(g, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < 8; ++k) silent.samples[k] = 1.0;  // t < 0 only
    const FirstBurstResult none = first_burst_fraction(silent);
    CHECK(none.no_crossing);
    CHECK(none.fraction == 0.0);
}

TEST_CASE("flatness metrics recover a synthetic boundary layer") {
    const Medium m = make_medium(100.0, 1.0, 1.0);
    const double w = 0.05;
    ExcitationProfile p;
    const std::size_t n = 512;
    p.z.resize(n);
    p.c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.z[i] = static_cast<double>(i) / static_cast<double>(n - 1);
        p.c[i] = 1.0 - 0.56 * std::exp2(-(1.0 - p.z[i]) / w);
    }

    const FlatnessResult r = flatness_metrics(p, m);
    CHECK(r.plateau_median == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.dip_depth == doctest::Approx(0.56).epsilon(1e-2));
    // Half-depth point of the synthetic dip sits exactly one w from the end.
    CHECK(r.width == doctest::Approx(w).epsilon(0.05));
    CHECK(r.expected_width == doctest::Approx(2.0 * std::log(2.0) / 10.0).epsilon(1e-12));
    CHECK(r.cv > 0.02);
    CHECK(r.cv < 0.08);

    ExcitationProfile coarse;
    coarse.z = {0.0, 0.5, 1.0};
    coarse.c = {1.0, 1.0, 0.5};
    CHECK_THROWS_AS((void)flatness_metrics(coarse, m), std::invalid_argument);
}

TEST_CASE("aggregated report for depth 10 on the default grid") {
    const Medium m = make_medium(10.0, 1.0, 1.0);
    const MetricsReport r = compute_metrics(m);

    CHECK(r.depth == 10.0);
    CHECK(std::abs(r.input_probability - 1.0) <= 1e-4);
    // Deterministic pipeline pins (same grid, same arithmetic path).
    CHECK(r.efficiency == doctest::Approx(0.236222038253).epsilon(1e-6));
    CHECK(r.leak_before_zero == doctest::Approx(0.150820814127).epsilon(1e-6));
    CHECK(r.retrieved_after_zero == doctest::Approx(0.387037696524).epsilon(1e-6));
    CHECK(r.efficiency_asymptotic == doctest::Approx(0.2863503535388916).epsilon(1e-12));
    CHECK(r.p_abs_closed == doctest::Approx(0.74383360).epsilon(1e-7));

    // Profile-derived quantities: loose pins, the z quadrature is approximate.
    CHECK(r.p_abs == doctest::Approx(0.688).epsilon(0.02));
    CHECK(r.flatness_cv == doctest::Approx(0.144).epsilon(0.15));
    CHECK(r.boundary_layer_width == doctest::Approx(0.32).epsilon(0.15));
    CHECK(r.boundary_layer_expected == doctest::Approx(2.0 * std::log(2.0) / std::sqrt(10.0)).epsilon(1e-12));
    CHECK(r.plateau_median > 0.0);
    CHECK(r.dip_depth > 0.0);
    CHECK(r.dip_depth < r.plateau_median);

    // Retrieved output pops up immediately after t = 0 and decays.
    CHECK(r.first_burst_fraction == doctest::Approx(0.9775520034).epsilon(1e-5));
    CHECK(r.first_burst_t_end == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(r.peak_density == doctest::Approx(3.26).epsilon(0.05));
    CHECK(r.peak_time > 0.0);
    CHECK(r.peak_time < 0.05);

    // Sanity rails.
    CHECK(r.efficiency > 0.0);
    CHECK(r.efficiency < 1.0);
    CHECK(r.p_abs > 0.0);
    CHECK(r.p_abs < 1.0);
    CHECK(r.leak_before_zero + r.retrieved_after_zero <= r.input_probability * (1.0 + 1e-12));
}

TEST_CASE("report for a caller-supplied input delegates consistently") {
    const Medium m = make_medium(10.0, 1.0, 1.0);
    const TimeGrid g = default_grid(m);
    const Signal f_in = build_optimal(m, g);
    const MetricsReport a = compute_metrics(m, g);
    const MetricsReport b = compute_metrics_for_input(m, f_in);
    CHECK(a.efficiency == b.efficiency);
    CHECK(a.p_abs == b.p_abs);
    CHECK(a.peak_density == b.peak_density);

    CHECK_THROWS_AS((void)compute_metrics_for_input(m, f_in, 8), std::invalid_argument);
    Signal empty;
    CHECK_THROWS_AS((void)compute_metrics_for_input(m, empty), std::invalid_argument);
}
