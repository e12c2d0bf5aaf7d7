#include "qmemsim/medium.hpp"

#include <cmath>
#include <stdexcept>

#include "qmemsim/specfun.hpp"

namespace qmemsim {

namespace {

void require_depth_coord(const Medium& m, double z, const char* who) {
    if (!std::isfinite(z) || z < 0.0 || z > m.length * (1.0 + 1e-12)) {
        throw std::domain_error(std::string(who) + ": z must lie in [0, length]");
    }
}

}  // namespace

Medium make_medium(double alpha, double length, double t2) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::domain_error("make_medium: alpha must be positive and finite");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::domain_error("make_medium: length must be positive and finite");
    }
    if (!(t2 > 0.0) || !std::isfinite(t2)) {
        throw std::domain_error("make_medium: t2 must be positive and finite");
    }
    return Medium{alpha, length, t2};
}

double b_of(const Medium& m, double z) {
    require_depth_coord(m, z, "b_of");
    return m.alpha * z / (2.0 * m.t2);
}

double g_factor_from_depth(double depth) {
    if (!(depth >= 0.0) || !std::isfinite(depth)) {
        throw std::domain_error("g_factor_from_depth: depth must be non-negative and finite");
    }
    const double s = 0.5 * depth;
    return bessel_i0_scaled(s) + bessel_i1_scaled(s);
}

double one_minus_g_from_depth(double depth) {
    if (!(depth >= 0.0) || !std::isfinite(depth)) {
        throw std::domain_error("one_minus_g_from_depth: depth must be non-negative and finite");
    }
    const double s = 0.5 * depth;
    if (depth < 0.01) {
        // 1 - g = s/2 - s^2/4 + (5/48) s^3 - (7/192) s^4 + O(s^5); the s^4
        // term keeps the branches consistent to ~1e-11 at the crossover.
        return s * (0.5 + s * (-0.25 + s * (5.0 / 48.0 - s * (7.0 / 192.0))));
    }
    return 1.0 - g_factor_from_depth(depth);
}

double g_of(const Medium& m, double z) {
    require_depth_coord(m, z, "g_of");
    return g_factor_from_depth(m.alpha * z);
}

double norm_const(const Medium& m) {
    const double bl = b_of(m, m.length);
    const double omg = one_minus_g_from_depth(m.depth());
    if (!(omg > 0.0)) throw std::domain_error("norm_const: degenerate medium");
    return 1.0 / std::sqrt(bl * omg);
}

cplx transfer_thin(const Medium& m, double dz, double w) {
    if (!(dz >= 0.0) || !std::isfinite(dz)) {
        throw std::domain_error("transfer_thin: dz must be non-negative and finite");
    }
    const double b = m.alpha * dz / (2.0 * m.t2);
    const cplx denom(w, 1.0 / m.t2);
    return 1.0 - cplx(0.0, b) / denom;
}

cplx transfer_thick(const Medium& m, double z, double w) {
    require_depth_coord(m, z, "transfer_thick");
    const double b = m.alpha * z / (2.0 * m.t2);
    const cplx denom(w, 1.0 / m.t2);
    return std::exp(-cplx(0.0, b) / denom);
}

double impulse_response_regular(const Medium& m, double z, double t) {
    require_depth_coord(m, z, "impulse_response_regular");
    if (t < 0.0) return 0.0;
    const double b = m.alpha * z / (2.0 * m.t2);
    if (t == 0.0) return 0.5 * b;  // theta(0) = 1/2 convention
    return b * phi_shape(b * t) * std::exp(-t / m.t2);
}

double mu_geometric(double wavelength, double beam_area) {
    if (!(wavelength > 0.0) || !(beam_area > 0.0)) {
        throw std::domain_error("mu_geometric: wavelength and beam area must be positive");
    }
    return 3.0 * wavelength * wavelength / (8.0 * pi * beam_area);
}

double alpha_from_geometry(double mu, double linear_density) {
    if (!(mu > 0.0) || !(linear_density > 0.0)) {
        throw std::domain_error("alpha_from_geometry: inputs must be positive");
    }
    return 4.0 * mu * linear_density;
}

TimeGrid default_grid(const Medium& m) {
    const double dt = m.t2 / (32.0 * std::max(m.depth(), 4.0));
    const double span = 40.0 * m.t2;  // window [-20 T2, 20 T2]
    std::size_t n = 2;
    while (static_cast<double>(n) * dt < span) n <<= 1;
    return make_centered_grid(n, dt);
}

}  // namespace qmemsim
