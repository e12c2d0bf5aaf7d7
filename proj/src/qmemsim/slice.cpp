#include "qmemsim/slice.hpp"

#include <cmath>
#include <stdexcept>

namespace qmemsim {

namespace {

void require_signal(const Signal& s, const char* who) {
    if (s.samples.empty() || s.samples.size() != s.grid.n || !(s.grid.dt > 0.0)) {
        throw std::invalid_argument(std::string(who) + ": invalid signal");
    }
}

// y(t) = Integral_0^inf f(t - tau) e^{-rate tau} dtau on the grid, assuming
// f vanishes before the first sample.  Trapezoidal rule in the recursive
// form y_k = e^{-rate dt} y_{k-1} + (dt/2)(f_k + e^{-rate dt} f_{k-1}),
// which applies the exact exponential decay between samples.  The seed is
// y_0 = 0 (integral over an empty interval); seeding (dt/2) f_0 instead
// would double-count the oldest endpoint and leave an O(dt) transient for
// drives that switch on at the first sample.
std::vector<cplx> exp_filter(const Signal& f, double rate) {
    const double dt = f.grid.dt;
    const double decay = std::exp(-rate * dt);
    const double half = 0.5 * dt;
    std::vector<cplx> y(f.size());
    y[0] = cplx{0.0, 0.0};
    for (std::size_t k = 1; k < f.size(); ++k) {
        y[k] = decay * y[k - 1] + half * (f.samples[k] + decay * f.samples[k - 1]);
    }
    return y;
}

}  // namespace

SliceParams make_slice(double np_mu, double t1) {
    if (!(np_mu >= 0.0) || !(t1 > 0.0) || !std::isfinite(np_mu) || !std::isfinite(t1)) {
        throw std::domain_error("make_slice: need np_mu >= 0 and t1 > 0");
    }
    return SliceParams{np_mu, t1};
}

SliceState slice_excitation(const Signal& field_in, const SliceParams& sp, cplx c_init) {
    require_signal(field_in, "slice_excitation");
    const double rate = (sp.np_mu + 1.0) / (2.0 * sp.t1);
    const double coupling = std::sqrt(sp.np_mu / sp.t1);
    auto y = exp_filter(field_in, rate);

    SliceState c;
    c.grid = field_in.grid;
    c.samples.resize(y.size());
    const double decay = std::exp(-rate * field_in.grid.dt);
    cplx hom = c_init;
    for (std::size_t k = 0; k < y.size(); ++k) {
        c.samples[k] = hom - coupling * y[k];
        hom *= decay;
    }
    return c;
}

Signal slice_output(const Signal& field_in, const SliceState& state, const SliceParams& sp) {
    require_signal(field_in, "slice_output");
    if (!(state.grid == field_in.grid)) {
        throw std::invalid_argument("slice_output: state and input grids differ");
    }
    const double coupling = std::sqrt(sp.np_mu / sp.t1);
    Signal out;
    out.grid = field_in.grid;
    out.samples.resize(field_in.size());
    for (std::size_t k = 0; k < field_in.size(); ++k) {
        out.samples[k] = field_in.samples[k] + coupling * state.samples[k];
    }
    return out;
}

Signal thin_scatter(const Signal& field_in, const Medium& m, double dz) {
    require_signal(field_in, "thin_scatter");
    if (!(dz > 0.0) || !std::isfinite(dz)) {
        throw std::domain_error("thin_scatter: dz must be positive and finite");
    }
    const double b = m.alpha * dz / (2.0 * m.t2);
    auto y = exp_filter(field_in, 1.0 / m.t2);

    Signal out;
    out.grid = field_in.grid;
    out.samples.resize(field_in.size());
    for (std::size_t k = 0; k < field_in.size(); ++k) {
        out.samples[k] = field_in.samples[k] - b * y[k];
    }
    return out;
}

Signal cascade(const Signal& field_in, const Medium& m, std::size_t n_slices) {
    require_signal(field_in, "cascade");
    if (n_slices == 0) throw std::invalid_argument("cascade: need at least one slice");
    const double dz = m.length / static_cast<double>(n_slices);
    Signal cur = field_in;
    for (std::size_t i = 0; i < n_slices; ++i) cur = thin_scatter(cur, m, dz);
    return cur;
}

}  // namespace qmemsim
