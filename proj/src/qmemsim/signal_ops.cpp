#include "qmemsim/signal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qmemsim/fft.hpp"

namespace qmemsim {

namespace {

constexpr double sqrt_2pi = 2.506628274631000502415765284811045253;

void require_valid(const Signal& s, const char* who) {
    if (s.samples.empty()) throw std::invalid_argument(std::string(who) + ": empty signal");
    if (s.samples.size() != s.grid.n) {
        throw std::invalid_argument(std::string(who) + ": sample count does not match grid");
    }
    if (!(s.grid.dt > 0.0) || !std::isfinite(s.grid.dt) || !std::isfinite(s.grid.t_start)) {
        throw std::invalid_argument(std::string(who) + ": invalid grid");
    }
}

std::size_t next_pow2(std::size_t m) {
    std::size_t p = 1;
    while (p < m) p <<= 1;
    return p;
}

}  // namespace

Spectrum forward_transform(const Signal& s) {
    require_valid(s, "forward_transform");
    const std::size_t n = s.grid.n;
    const double dt = s.grid.dt;

    std::vector<cplx> work(n);
    for (std::size_t k = 0; k < n; ++k) {
        // e^{i w_start k dt} = e^{-i pi k} = (-1)^k
        work[k] = (k % 2 == 0) ? s.samples[k] : -s.samples[k];
    }
    fft::forward(work);

    Spectrum sp;
    sp.dw = 2.0 * pi / (static_cast<double>(n) * dt);
    sp.w_start = -pi / dt;
    sp.t_start = s.grid.t_start;
    sp.dt = dt;
    sp.samples.resize(n);
    const double scale = dt / sqrt_2pi;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = sp.w(j);
        sp.samples[j] = scale * std::polar(1.0, w * s.grid.t_start) * work[j];
    }
    return sp;
}

Signal inverse_transform(const Spectrum& sp) {
    if (sp.samples.empty()) throw std::invalid_argument("inverse_transform: empty spectrum");
    if (!(sp.dt > 0.0) || !(sp.dw > 0.0)) {
        throw std::invalid_argument("inverse_transform: invalid spectral grid");
    }
    const std::size_t n = sp.samples.size();

    std::vector<cplx> work(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = sp.w(j);
        work[j] = sp.samples[j] * std::polar(1.0, -w * sp.t_start);
    }
    fft::backward(work);

    Signal s;
    s.grid.t_start = sp.t_start;
    s.grid.dt = sp.dt;
    s.grid.n = n;
    s.samples.resize(n);
    const double scale = sp.dw / sqrt_2pi;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx v = scale * work[k];
        s.samples[k] = (k % 2 == 0) ? v : -v;
    }
    return s;
}

Signal convolve(const Signal& f, const Signal& g) {
    require_valid(f, "convolve");
    require_valid(g, "convolve");
    const double dt = f.grid.dt;
    if (std::abs(g.grid.dt - dt) > 1e-12 * dt) {
        throw std::invalid_argument("convolve: signals must share the same dt");
    }
    const std::size_t n_out = f.size() + g.size() - 1;
    const std::size_t m = next_pow2(n_out);

    std::vector<cplx> fa(m, cplx{0.0, 0.0});
    std::vector<cplx> fb(m, cplx{0.0, 0.0});
    std::copy(f.samples.begin(), f.samples.end(), fa.begin());
    std::copy(g.samples.begin(), g.samples.end(), fb.begin());
    fft::backward(fa);
    fft::backward(fb);
    for (std::size_t j = 0; j < m; ++j) fa[j] *= fb[j];
    fft::forward(fa);

    Signal out;
    out.grid.dt = dt;
    out.grid.n = n_out;
    out.grid.t_start = f.grid.t_start + g.grid.t_start;
    out.samples.resize(n_out);
    const double scale = dt / static_cast<double>(m);
    for (std::size_t k = 0; k < n_out; ++k) out.samples[k] = scale * fa[k];
    return out;
}

ProbabilityResult probability(const Signal& s, double t_lo, double t_hi) {
    require_valid(s, "probability");
    const double dt = s.grid.dt;
    const double b0 = s.grid.t_start - 0.5 * dt;  // left boundary of first cell
    const double nb = static_cast<double>(s.grid.n);

    auto snap = [&](double t, bool is_lo) -> double {
        if (std::isnan(t)) throw std::invalid_argument("probability: NaN bound");
        if (t == -std::numeric_limits<double>::infinity()) return 0.0;
        if (t == std::numeric_limits<double>::infinity()) return nb;
        double m = std::round((t - b0) / dt);
        (void)is_lo;
        return std::clamp(m, 0.0, nb);
    };

    const double m_lo = snap(t_lo, true);
    const double m_hi = snap(t_hi, false);

    ProbabilityResult r;
    r.lo_used = b0 + m_lo * dt;
    r.hi_used = b0 + m_hi * dt;
    if (m_hi <= m_lo) {
        r.empty = true;
        return r;
    }
    double acc = 0.0;
    const std::size_t k_lo = static_cast<std::size_t>(m_lo);
    const std::size_t k_hi = static_cast<std::size_t>(m_hi);
    for (std::size_t k = k_lo; k < k_hi; ++k) acc += std::norm(s.samples[k]);
    r.value = acc * dt;
    return r;
}

Signal time_reverse(const Signal& s) {
    require_valid(s, "time_reverse");
    Signal out;
    out.grid.dt = s.grid.dt;
    out.grid.n = s.grid.n;
    out.grid.t_start = -s.grid.t_end();
    out.samples.assign(s.samples.rbegin(), s.samples.rend());
    return out;
}

}  // namespace qmemsim
