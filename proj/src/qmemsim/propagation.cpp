#include "qmemsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmemsim/pulse.hpp"
#include "qmemsim/signal_ops.hpp"

namespace qmemsim {

namespace {

constexpr double sqrt_2pi = 2.506628274631000502415765284811045253;

void require_signal(const Signal& s, const char* who) {
    if (s.samples.empty() || s.samples.size() != s.grid.n || !(s.grid.dt > 0.0)) {
        throw std::invalid_argument(std::string(who) + ": invalid signal");
    }
}

void require_z_grid(const Medium& m, const std::vector<double>& z, const char* who) {
    if (z.empty()) throw std::invalid_argument(std::string(who) + ": empty z grid");
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!std::isfinite(z[i]) || z[i] < 0.0 || z[i] > m.length * (1.0 + 1e-12)) {
            throw std::domain_error(std::string(who) + ": z out of [0, length]");
        }
        if (i > 0 && z[i] <= z[i - 1]) {
            throw std::invalid_argument(std::string(who) + ": z grid must be increasing");
        }
    }
}

// Estimated height of a jump of the input at t = 0 (e.g. the optimal pulse
// cutting off), used for the analytic band-truncation tail.  Returns 0 when
// no jump is detected.
double jump_at_zero(const Signal& in) {
    const TimeGrid& g = in.grid;
    // index of last sample with t < 0
    const double kf = std::floor((-g.t_start) / g.dt - 1e-9);
    if (kf < 0.0 || kf >= static_cast<double>(g.n)) return 0.0;
    const std::size_t k_neg = static_cast<std::size_t>(kf);
    if (k_neg + 1 >= g.n) return 0.0;
    const double below = std::abs(in.samples[k_neg]);
    const double above = std::abs(in.samples[k_neg + 1]);
    if (below > 5.0 * above + 1e-300) return in.samples[k_neg].real();
    return 0.0;
}

}  // namespace

Signal propagate(const Medium& m, const Signal& field_in, double z) {
    require_signal(field_in, "propagate");
    Spectrum sp = forward_transform(field_in);
    for (std::size_t j = 0; j < sp.size(); ++j) {
        sp.samples[j] *= transfer_thick(m, z, sp.w(j));
    }
    return inverse_transform(sp);
}

std::vector<double> default_z_grid(const Medium& m, std::size_t n_base) {
    if (n_base < 8) throw std::invalid_argument("default_z_grid: n_base too small");
    const double L = m.length;
    const double h = L / static_cast<double>(n_base);
    const double layer = std::min(3.0 * 2.0 * std::log(2.0) / std::sqrt(m.depth()), 1.0) * L;
    const std::size_t coarse_end =
        n_base - std::min<std::size_t>(n_base, static_cast<std::size_t>(std::ceil(layer / h)));

    std::vector<double> z;
    for (std::size_t i = 0; i < coarse_end; ++i) z.push_back(static_cast<double>(i) * h);
    const double h4 = h / 4.0;
    const double z0 = static_cast<double>(coarse_end) * h;
    const std::size_t fine_steps = (n_base - coarse_end) * 4;
    for (std::size_t i = 0; i <= fine_steps; ++i) {
        z.push_back(std::min(z0 + static_cast<double>(i) * h4, L));
    }
    z.back() = L;
    return z;
}

ExcitationProfile atomic_amplitude(const Medium& m, const Signal& field_in,
                                   const std::vector<double>& z, double t,
                                   double band_limit) {
    require_signal(field_in, "atomic_amplitude");
    require_z_grid(m, z, "atomic_amplitude");

    const Spectrum sp = forward_transform(field_in);
    const double bl = b_of(m, m.length);
    const double nyquist = pi / field_in.grid.dt;
    double band = band_limit > 0.0
                      ? std::min(band_limit, nyquist)
                      : std::min(nyquist, std::max(3000.0 / m.t2, 12.0 * bl));

    // Distinct spacings of the z grid, so each frequency mode needs only a
    // handful of complex exponentials for the z recurrence.
    std::vector<double> deltas;
    std::vector<std::size_t> delta_idx(z.size() > 0 ? z.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double d = z[i + 1] - z[i];
        std::size_t found = deltas.size();
        for (std::size_t j = 0; j < deltas.size(); ++j) {
            if (std::abs(deltas[j] - d) < 1e-12 * m.length) {
                found = j;
                break;
            }
        }
        if (found == deltas.size()) deltas.push_back(d);
        delta_idx[i] = found;
    }

    const double prefac = std::sqrt(m.alpha / (2.0 * m.t2)) * sp.dw / sqrt_2pi;
    const double inv_t2 = 1.0 / m.t2;
    const double rate = m.alpha / (2.0 * m.t2);  // b(z) = rate * z

    std::vector<cplx> acc(z.size(), cplx{0.0, 0.0});
    std::vector<cplx> step(deltas.size());

    for (std::size_t j = 0; j < sp.size(); ++j) {
        const double w = sp.w(j);
        if (std::abs(w) > band) continue;
        const cplx denom(w, inv_t2);
        const cplx v = prefac * sp.samples[j] * (cplx(0.0, 1.0) / denom) *
                       std::polar(1.0, -w * t);
        const cplx u = -cplx(0.0, rate) / denom;  // H(w, z) = e^{u z}
        for (std::size_t d = 0; d < deltas.size(); ++d) step[d] = std::exp(u * deltas[d]);
        cplx p = std::exp(u * z[0]) * v;
        acc[0] += p;
        for (std::size_t i = 0; i + 1 < z.size(); ++i) {
            p *= step[delta_idx[i]];
            acc[i + 1] += p;
        }
    }

    // Analytic correction for the 1/w^2 tail cut off at the band edge; only
    // meaningful near t = 0 where the tail is non-oscillatory, and only when
    // the input actually jumps at t = 0.
    if (std::abs(t) <= field_in.grid.dt) {
        const double jump = jump_at_zero(field_in);
        if (jump != 0.0) {
            const double corr = std::sqrt(m.alpha / (2.0 * m.t2)) * jump / (pi * band);
            for (auto& a : acc) a += corr;
        }
    }

    ExcitationProfile prof;
    prof.z = z;
    prof.c = std::move(acc);
    prof.t = t;
    return prof;
}

ExcitationProfile atomic_amplitude_fd(const Medium& m, const Signal& field_in,
                                      const std::vector<double>& z, double t, double dz) {
    require_signal(field_in, "atomic_amplitude_fd");
    require_z_grid(m, z, "atomic_amplitude_fd");
    if (!(dz > 0.0)) throw std::invalid_argument("atomic_amplitude_fd: dz must be positive");

    const Spectrum sp = forward_transform(field_in);
    const double inv_t2 = 1.0 / m.t2;
    const double rate = m.alpha / (2.0 * m.t2);

    // F(t, z) at a single time via the full-band mode sum.
    auto field_at = [&](double zz) -> cplx {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < sp.size(); ++j) {
            const double w = sp.w(j);
            const cplx u = -cplx(0.0, rate * zz) / cplx(w, inv_t2);
            acc += sp.samples[j] * std::exp(u) * std::polar(1.0, -w * t);
        }
        return acc * (sp.dw / sqrt_2pi);
    };

    const double coupling = -std::sqrt(2.0 * m.t2 / m.alpha);
    ExcitationProfile prof;
    prof.z = z;
    prof.t = t;
    prof.c.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        // Central difference, shifted to one side where z touches 0.
        const double z_lo = std::max(z[i] - dz, 0.0);
        const double z_hi = z[i] + dz;
        prof.c[i] = coupling * (field_at(z_hi) - field_at(z_lo)) / (z_hi - z_lo);
    }
    return prof;
}

ExcitationProfile atomic_amplitude_tau(const Medium& m, const Signal& field_in,
                                       const std::vector<double>& z, double t) {
    require_signal(field_in, "atomic_amplitude_tau");
    require_z_grid(m, z, "atomic_amplitude_tau");

    const TimeGrid& g = field_in.grid;
    // t has to sit on a cell boundary: samples then lie at tau = (k+1/2) dt
    // behind it and the integral is a plain midpoint sum.
    const double cells = (t - (g.t_start - 0.5 * g.dt)) / g.dt;
    if (std::abs(cells - std::round(cells)) > 1e-6) {
        throw std::invalid_argument(
            "atomic_amplitude_tau: t must lie on an integration-cell boundary");
    }
    const long n_before = std::lround(cells);  // samples strictly before t
    if (n_before <= 0 || n_before > static_cast<long>(g.n)) {
        throw std::domain_error("atomic_amplitude_tau: t outside the grid");
    }

    const double coupling = std::sqrt(m.alpha / (2.0 * m.t2));
    ExcitationProfile prof;
    prof.z = z;
    prof.t = t;
    prof.c.resize(z.size());

    for (std::size_t i = 0; i < z.size(); ++i) {
        const Signal fz = propagate(m, field_in, z[i]);
        cplx acc{0.0, 0.0};
        // Walk backwards from just before t; stop once e^{-tau/T2} underflows
        // any conceivable contribution.
        for (long k = n_before - 1; k >= 0; --k) {
            const double tau = t - g.t(static_cast<std::size_t>(k));
            const double w = std::exp(-tau / m.t2);
            if (w < 1e-18) break;
            acc += fz.samples[static_cast<std::size_t>(k)] * w;
        }
        prof.c[i] = coupling * acc * g.dt;
    }
    return prof;
}

double atomic_amplitude_closed(const Medium& m, double z) {
    if (!std::isfinite(z) || z < 0.0 || z > m.length * (1.0 + 1e-12)) {
        throw std::domain_error("atomic_amplitude_closed: z out of [0, length]");
    }
    const double a = norm_const(m);
    const double bl = b_of(m, m.length);
    const double d = m.depth();
    const double expo = -m.alpha * (m.length - z) / (2.0 * std::sqrt(d));
    return -a * std::sqrt(bl / m.length) * (1.0 - std::exp(expo) / std::sqrt(pi));
}

double field_at_zero_closed(const Medium& m, double z) {
    if (!std::isfinite(z) || z < 0.0 || z > m.length * (1.0 + 1e-12)) {
        throw std::domain_error("field_at_zero_closed: z out of [0, length]");
    }
    const double a = norm_const(m);
    const double bz = b_of(m, z);
    const double blz = m.alpha * (m.length - z) / (2.0 * m.t2);
    const double gz = g_of(m, z);
    const double expo = -blz * m.t2 / (1.0 + std::sqrt(m.alpha * z));
    return a * (-bz * gz * std::exp(expo) - 0.5 * blz + 0.5 * bz);
}

Signal field_inside_decomposition(const Medium& m, double z, const TimeGrid& grid, int m_max) {
    if (!(z > 0.0) || !(z < m.length)) {
        throw std::domain_error("field_inside_decomposition: need 0 < z < length");
    }
    if (grid.n == 0 || grid.n % 2 != 0) {
        throw std::invalid_argument("field_inside_decomposition: grid must have even n");
    }
    // The mirrored term F_in^z(-t) and the convolution offset below are only
    // exact when the samples are staggered symmetrically about t = 0.
    const double centred_start = (0.5 - 0.5 * static_cast<double>(grid.n)) * grid.dt;
    if (std::abs(grid.t_start - centred_start) > 1e-9 * grid.dt) {
        throw ConfigError("field_inside_decomposition: grid must be centred on t = 0");
    }

    const Medium med_z = make_medium(m.alpha, z, m.t2);
    const Medium med_rest = make_medium(m.alpha, m.length - z, m.t2);
    const double a_l = norm_const(m);
    const double a_z = norm_const(med_z);
    const double a_rest = norm_const(med_rest);

    // gamma for depth z on an integer-aligned grid (sample on t = 0), so its
    // convolution with the half-step-staggered input lands back on the
    // staggered grid.
    TimeGrid int_grid;
    int_grid.dt = grid.dt;
    int_grid.n = grid.n;
    int_grid.t_start = -0.5 * static_cast<double>(grid.n) * grid.dt;
    const Signal gamma_int = gamma_grid(med_z, int_grid, m_max);

    const Signal f_in_rest = build_optimal(med_rest, grid);
    const Signal conv = convolve(gamma_int, f_in_rest);

    const Signal gamma_stag = gamma_grid(med_z, grid, m_max);
    const Signal f_in_z_rev = time_reverse(build_optimal(med_z, grid));

    Signal out;
    out.grid = grid;
    out.samples.resize(grid.n);
    const double c1 = a_l / (a_z * a_rest);
    const double c2 = a_l / a_z;
    const double c3 = a_l / a_rest;
    const std::size_t off = grid.n / 2;  // conv index offset mapping back to `grid`
    for (std::size_t i = 0; i < grid.n; ++i) {
        out.samples[i] = c1 * conv.samples[i + off] + c2 * gamma_stag.samples[i] +
                         c3 * f_in_rest.samples[i] - c2 * f_in_z_rev.samples[i];
    }
    return out;
}

double field_at_zero_quadrature(const Medium& m, double z) {
    if (!std::isfinite(z) || z < 0.0 || z > m.length * (1.0 + 1e-12)) {
        throw std::domain_error("field_at_zero_quadrature: z out of [0, length]");
    }
    const double a = norm_const(m);
    const double bl = b_of(m, m.length);
    const double bz = b_of(m, z);
    const double inv_t2 = 1.0 / m.t2;

    // F(0, z) = (A / 2 pi) Integral (H(-w, L) - 1) H(w, z) dw, folded to
    // w > 0 so the odd 1/w part cancels exactly; Simpson rule plus the
    // analytic even 1/w^2 tail beyond the cutoff.
    auto folded = [&](double w) -> double {
        const cplx dp(w, inv_t2);
        const cplx dm(-w, inv_t2);
        const cplx term_p = (std::exp(-cplx(0.0, bl) / dm) - 1.0) * std::exp(-cplx(0.0, bz) / dp);
        const cplx term_m = (std::exp(-cplx(0.0, bl) / dp) - 1.0) * std::exp(-cplx(0.0, bz) / dm);
        return (term_p + term_m).real();
    };

    // The integrand's oscillation is fastest (rate ~30/T2) just above the
    // exponential cutoff of |H|; a step of 0.02/T2 oversamples it safely.
    const double cutoff = 50.0 * std::max(bl, inv_t2);
    std::size_t n = static_cast<std::size_t>(std::ceil(cutoff / (0.02 * inv_t2)));
    if (n % 2 != 0) ++n;
    const double h = cutoff / static_cast<double>(n);

    double s = folded(0.0) + folded(cutoff);
    for (std::size_t k = 1; k < n; ++k) {
        s += folded(static_cast<double>(k) * h) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    const double integral = s * h / 3.0;

    // Even tail: (H(-w,L)-1) H(w,z) ~ (b_l b_z - b_l/T2 - b_l^2/2)/w^2.
    const double tail = 2.0 * (bl * bz - bl * inv_t2 - 0.5 * bl * bl) / cutoff;

    return a / (2.0 * pi) * (integral + tail);
}

}  // namespace qmemsim
