// Transform, convolution, probability and grid-handling tests.
//
// The Fourier pair under test is the unitary convention
//   F(w) = (2 pi)^{-1/2} Int f(t) e^{+i w t} dt,
//   f(t) = (2 pi)^{-1/2} Int F(w) e^{-i w t} dw,
// discretized on staggered midpoint grids.  Analytic images, the discrete
// Parseval identity, and a direct O(n^2) convolution serve as oracles.

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qmemsim/signal_ops.hpp"
#include "qmemsim/types.hpp"

using namespace qmemsim;

namespace {

Signal one_sided_exponential(std::size_t n, double dt, double t2) {
    Signal s;
    s.grid = make_centered_grid(n, dt);
    s.samples.resize(n);
    const double amp = std::sqrt(2.0 / t2);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = s.grid.t(k);
        s.samples[k] = t < 0.0 ? amp * std::exp(t / t2) : 0.0;
    }
    return s;
}

}  // namespace

TEST_CASE("forward transform reproduces the analytic image of a one-sided exponential") {
    // f(t) = sqrt(2/T2) e^{t/T2} theta(-t)  ->  F(w) = (pi T2)^{-1/2} / (1/T2 + i w).
    const double t2 = 1.0;
    const double dt = 1.0 / 256.0;
    const Signal s = one_sided_exponential(8192, dt, t2);
    const Spectrum sp = forward_transform(s);

    CHECK(sp.size() == s.size());
    CHECK(sp.w_start == doctest::Approx(-pi / dt).epsilon(1e-14));
    CHECK(sp.dw == doctest::Approx(2.0 * pi / (static_cast<double>(s.size()) * dt)).epsilon(1e-14));

    // w = 0 lands exactly on bin n/2.
    const std::size_t j0 = s.size() / 2;
    CHECK(std::abs(sp.w(j0)) < 1e-12);
    CHECK(oracles::close_abs(std::abs(sp.samples[j0]), 1.0 / std::sqrt(pi), 1e-5));

    for (double w_target : {-10.0, -3.0, -1.0, 0.5, 2.0, 10.0}) {
        const std::size_t j =
            j0 + static_cast<std::size_t>(std::llround(w_target / sp.dw));
        const double w = sp.w(j);
        const cplx expected = 1.0 / std::sqrt(pi * t2) / cplx(1.0 / t2, w);
        CHECK(std::abs(sp.samples[j] - expected) <= 1e-4 * std::abs(expected));
    }
}

TEST_CASE("forward and inverse transforms are mutual inverses, including off-center grids") {
    std::mt19937 rng(7);
    for (double t_start : {-4.0, 0.37, 2.25}) {
        const Signal s = oracles::random_signal(rng, 1024, 1.0 / 128.0, t_start);
        const Signal back = inverse_transform(forward_transform(s));
        REQUIRE(back.grid == s.grid);
        CHECK(oracles::rel_l2(back.samples, s.samples) < 1e-12);
    }
}

TEST_CASE("discrete Parseval identity holds") {
    std::mt19937 rng(11);
    const Signal s = oracles::random_signal(rng, 512, 0.01, -2.56);
    const Spectrum sp = forward_transform(s);
    double pt = 0.0, pw = 0.0;
    for (const auto& v : s.samples) pt += std::norm(v) * s.grid.dt;
    for (const auto& v : sp.samples) pw += std::norm(v) * sp.dw;
    CHECK(oracles::close_rel(pt, pw, 1e-13));
}

TEST_CASE("FFT convolution matches direct quadrature on random signals") {
    std::mt19937 rng(23);
    const Signal f = oracles::random_signal(rng, 512, 0.02, -1.0);
    const Signal g = oracles::random_signal(rng, 173, 0.02, 0.4);
    const Signal fast = convolve(f, g);
    const Signal slow = oracles::direct_convolve(f, g);
    REQUIRE(fast.size() == f.size() + g.size() - 1);
    CHECK(fast.grid.t_start == doctest::Approx(f.grid.t_start + g.grid.t_start).epsilon(1e-14));
    CHECK(oracles::rel_l2(fast.samples, slow.samples) < 1e-12);
}

TEST_CASE("convolution of two unit boxes is the exact triangle") {
    const std::size_t m = 64;
    const double dt = 1.0 / static_cast<double>(m);
    Signal box;
    box.grid = TimeGrid{dt / 2.0, dt, m};  // midpoint samples covering (0, 1)
    box.samples.assign(m, cplx{1.0, 0.0});
    const Signal tri = convolve(box, box);
    for (std::size_t k = 0; k < tri.size(); ++k) {
        const double t = tri.grid.t(k);
        const double expected = std::min(t, 2.0 - t);
        CHECK(oracles::close_abs(tri.samples[k].real(), expected, 1e-13));
        CHECK(std::abs(tri.samples[k].imag()) < 1e-15);
    }
}

TEST_CASE("convolution rejects mismatched sample spacings") {
    Signal f, g;
    f.grid = TimeGrid{0.0, 0.1, 8};
    f.samples.assign(8, cplx{1.0, 0.0});
    g.grid = TimeGrid{0.0, 0.2, 8};
    g.samples.assign(8, cplx{1.0, 0.0});
    CHECK_THROWS_AS((void)convolve(f, g), std::invalid_argument);
}

TEST_CASE("probability snaps bounds to integration-cell boundaries") {
    Signal s;
    s.grid = make_centered_grid(8, 0.5);  // samples -1.75 .. 1.75, cells [-2, 2]
    s.samples.assign(8, cplx{1.0, 0.0});

    const double inf = std::numeric_limits<double>::infinity();
    CHECK(probability(s, -inf, inf).value == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(probability(s, -inf, 0.0).value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(probability(s, 0.0, inf).value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(probability(s, 0.0, inf).lo_used == doctest::Approx(0.0));

    // -0.3 and 0.4 snap to the nearest boundaries -0.5 and 0.5.
    const auto r = probability(s, -0.3, 0.4);
    CHECK(r.lo_used == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(r.hi_used == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(!r.empty);

    // Both bounds snapping to the same boundary leaves an empty window.
    const auto e = probability(s, -0.2, 0.2);
    CHECK(e.empty);
    CHECK(e.value == 0.0);

    // Bounds beyond the grid clamp to the grid edges.
    const auto c = probability(s, -100.0, 100.0);
    CHECK(c.value == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("time reverse flips samples about t = 0 and is an involution") {
    std::mt19937 rng(31);
    const Signal s = oracles::random_signal(rng, 10, 0.25, 1.0);
    const Signal r = time_reverse(s);
    CHECK(r.grid.t_start == doctest::Approx(-s.grid.t_end()).epsilon(1e-14));
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(r.samples[k] == s.samples[s.size() - 1 - k]);
        CHECK(r.grid.t(k) == doctest::Approx(-s.grid.t(s.size() - 1 - k)).epsilon(1e-13));
    }
    const Signal rr = time_reverse(r);
    CHECK(rr.grid == s.grid);
    CHECK(oracles::rel_l2(rr.samples, s.samples) == 0.0);
}

TEST_CASE("centered grids stagger samples half a step off zero") {
    const TimeGrid g = make_centered_grid(16, 0.25);
    double closest = 1e300;
    for (std::size_t k = 0; k < g.n; ++k) closest = std::min(closest, std::abs(g.t(k)));
    CHECK(closest == doctest::Approx(0.125).epsilon(1e-14));
    CHECK_THROWS_AS(make_centered_grid(15, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(make_centered_grid(16, 0.0), std::invalid_argument);
}
