#include "qmemsim/qmemsim.h"

#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>

#include "qmemsim/medium.hpp"
#include "qmemsim/metrics.hpp"
#include "qmemsim/propagation.hpp"
#include "qmemsim/pulse.hpp"
#include "qmemsim/signal_ops.hpp"
#include "qmemsim/types.hpp"

struct qms_medium {
    qmemsim::Medium m;
};

struct qms_signal {
    qmemsim::Signal s;
};

struct qms_profile {
    qmemsim::ExcitationProfile p;
};

namespace {

thread_local std::string g_last_error;

qms_status fail(qms_status code, const char* what) {
    g_last_error = what;
    return code;
}

// Runs `fn`, translating C++ exceptions into status codes.
template <typename Fn>
qms_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const qmemsim::ConfigError& e) {
        return fail(QMS_ERR_CONFIG, e.what());
    } catch (const std::domain_error& e) {
        return fail(QMS_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(QMS_ERR_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(QMS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(QMS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(QMS_ERR_INTERNAL, "unknown error");
    }
}

qmemsim::TimeGrid to_grid(const qms_grid_spec& g) {
    if (g.n == 0 || !(g.dt > 0.0)) throw std::invalid_argument("grid: n and dt must be positive");
    return qmemsim::TimeGrid{g.t_start, g.dt, g.n};
}

qms_grid_spec from_grid(const qmemsim::TimeGrid& g) {
    return qms_grid_spec{g.t_start, g.dt, g.n};
}

qms_metrics from_report(const qmemsim::MetricsReport& r) {
    qms_metrics mm;
    mm.depth = r.depth;
    mm.input_probability = r.input_probability;
    mm.efficiency = r.efficiency;
    mm.efficiency_asymptotic = r.efficiency_asymptotic;
    mm.leak_before_zero = r.leak_before_zero;
    mm.retrieved_after_zero = r.retrieved_after_zero;
    mm.p_abs = r.p_abs;
    mm.p_abs_closed = r.p_abs_closed;
    mm.first_burst_fraction = r.first_burst_fraction;
    mm.first_burst_t_end = r.first_burst_t_end;
    mm.flatness_cv = r.flatness_cv;
    mm.boundary_layer_width = r.boundary_layer_width;
    mm.boundary_layer_expected = r.boundary_layer_expected;
    mm.plateau_median = r.plateau_median;
    mm.dip_depth = r.dip_depth;
    mm.peak_density = r.peak_density;
    mm.peak_time = r.peak_time;
    return mm;
}

}  // namespace

extern "C" {

const char* qms_version(void) { return "1.0.0"; }

const char* qms_last_error(void) { return g_last_error.c_str(); }

qms_status qms_medium_create(double alpha, double length, double t2, qms_medium** out) {
    if (!out) return fail(QMS_ERR_ARGUMENT, "out is null");
    return guarded([&] {
        auto* h = new qms_medium{qmemsim::make_medium(alpha, length, t2)};
        *out = h;
        return QMS_OK;
    });
}

void qms_medium_free(qms_medium* m) { delete m; }

qms_status qms_medium_depth(const qms_medium* m, double* out) {
    if (!m || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    *out = m->m.depth();
    return QMS_OK;
}

qms_status qms_medium_norm_const(const qms_medium* m, double* out) {
    if (!m || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = qmemsim::norm_const(m->m);
        return QMS_OK;
    });
}

qms_status qms_medium_g_factor(const qms_medium* m, double z, double* out) {
    if (!m || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = qmemsim::g_of(m->m, z);
        return QMS_OK;
    });
}

qms_status qms_medium_default_grid(const qms_medium* m, qms_grid_spec* out) {
    if (!m || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = from_grid(qmemsim::default_grid(m->m));
        return QMS_OK;
    });
}

qms_status qms_mu_geometric(double wavelength, double beam_area, double* out) {
    if (!out) return fail(QMS_ERR_ARGUMENT, "out is null");
    return guarded([&] {
        *out = qmemsim::mu_geometric(wavelength, beam_area);
        return QMS_OK;
    });
}

qms_status qms_alpha_from_geometry(double mu, double linear_density, double* out) {
    if (!out) return fail(QMS_ERR_ARGUMENT, "out is null");
    return guarded([&] {
        *out = qmemsim::alpha_from_geometry(mu, linear_density);
        return QMS_OK;
    });
}

qms_status qms_signal_create(const qms_grid_spec* grid, const double* re, const double* im,
                             qms_signal** out) {
    if (!grid || !re || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        qmemsim::Signal s;
        s.grid = to_grid(*grid);
        s.samples.resize(grid->n);
        for (size_t k = 0; k < grid->n; ++k) {
            s.samples[k] = qmemsim::cplx(re[k], im ? im[k] : 0.0);
        }
        *out = new qms_signal{std::move(s)};
        return QMS_OK;
    });
}

void qms_signal_free(qms_signal* s) { delete s; }

qms_status qms_signal_grid(const qms_signal* s, qms_grid_spec* out) {
    if (!s || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    *out = from_grid(s->s.grid);
    return QMS_OK;
}

qms_status qms_signal_copy_data(const qms_signal* s, double* re, double* im) {
    if (!s || !re || !im) return fail(QMS_ERR_ARGUMENT, "null argument");
    for (size_t k = 0; k < s->s.size(); ++k) {
        re[k] = s->s.samples[k].real();
        im[k] = s->s.samples[k].imag();
    }
    return QMS_OK;
}

qms_status qms_signal_probability(const qms_signal* s, double t_lo, double t_hi, double* out) {
    if (!s || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = qmemsim::probability(s->s, t_lo, t_hi).value;
        return QMS_OK;
    });
}

qms_status qms_optimal_pulse(const qms_medium* m, const qms_grid_spec* grid, qms_signal** out) {
    if (!m || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const qmemsim::TimeGrid g = grid ? to_grid(*grid) : qmemsim::default_grid(m->m);
        *out = new qms_signal{qmemsim::build_optimal(m->m, g)};
        return QMS_OK;
    });
}

qms_status qms_propagate(const qms_medium* m, const qms_signal* in, double z, qms_signal** out) {
    if (!m || !in || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new qms_signal{qmemsim::propagate(m->m, in->s, z)};
        return QMS_OK;
    });
}

qms_status qms_gamma_value(const qms_medium* m, double t, int m_max, double* value,
                           int* truncated) {
    if (!m || !value) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const auto r = qmemsim::gamma_series(m->m, t, m_max);
        *value = r.value;
        if (truncated) *truncated = r.truncated ? 1 : 0;
        return QMS_OK;
    });
}

qms_status qms_analytic_output(const qms_medium* m, const qms_grid_spec* grid, int m_max,
                               qms_signal** out) {
    if (!m || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const qmemsim::TimeGrid g = grid ? to_grid(*grid) : qmemsim::default_grid(m->m);
        *out = new qms_signal{qmemsim::analytic_output(m->m, g, m_max)};
        return QMS_OK;
    });
}

qms_status qms_excitation_profile(const qms_medium* m, const qms_signal* in, size_t z_points,
                                  double t, qms_profile** out) {
    if (!m || !in || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const auto zg = qmemsim::default_z_grid(m->m, z_points == 0 ? 512 : z_points);
        *out = new qms_profile{qmemsim::atomic_amplitude(m->m, in->s, zg, t)};
        return QMS_OK;
    });
}

qms_status qms_excitation_profile_z(const qms_medium* m, const qms_signal* in, const double* z,
                                    size_t nz, double t, qms_profile** out) {
    if (!m || !in || !z || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    if (nz == 0) return fail(QMS_ERR_ARGUMENT, "empty z list");
    return guarded([&] {
        const std::vector<double> zg(z, z + nz);
        *out = new qms_profile{qmemsim::atomic_amplitude(m->m, in->s, zg, t)};
        return QMS_OK;
    });
}

void qms_profile_free(qms_profile* p) { delete p; }

qms_status qms_profile_size(const qms_profile* p, size_t* out) {
    if (!p || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    *out = p->p.z.size();
    return QMS_OK;
}

qms_status qms_profile_copy_data(const qms_profile* p, double* z, double* re, double* im) {
    if (!p || !z || !re || !im) return fail(QMS_ERR_ARGUMENT, "null argument");
    for (size_t i = 0; i < p->p.z.size(); ++i) {
        z[i] = p->p.z[i];
        re[i] = p->p.c[i].real();
        im[i] = p->p.c[i].imag();
    }
    return QMS_OK;
}

qms_status qms_profile_absorbed(const qms_profile* p, double* out) {
    if (!p || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = qmemsim::absorption_probability(p->p);
        return QMS_OK;
    });
}

qms_status qms_amplitude_closed(const qms_medium* m, double z, double* out) {
    if (!m || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = qmemsim::atomic_amplitude_closed(m->m, z);
        return QMS_OK;
    });
}

qms_status qms_compute_metrics(const qms_medium* m, const qms_grid_spec* grid, size_t z_points,
                               qms_metrics* out) {
    if (!m || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const qmemsim::TimeGrid g = grid ? to_grid(*grid) : qmemsim::TimeGrid{};
        *out = from_report(qmemsim::compute_metrics(m->m, g, z_points == 0 ? 512 : z_points));
        return QMS_OK;
    });
}

qms_status qms_compute_metrics_for(const qms_medium* m, const qms_signal* in, size_t z_points,
                                   qms_metrics* out) {
    if (!m || !in || !out) return fail(QMS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = from_report(
            qmemsim::compute_metrics_for_input(m->m, in->s, z_points == 0 ? 512 : z_points));
        return QMS_OK;
    });
}

}  // extern "C"
