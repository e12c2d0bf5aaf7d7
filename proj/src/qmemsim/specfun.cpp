#include "qmemsim/specfun.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qmemsim {

namespace {

// GSL aborts on error by default; disable that once, process-wide, and rely
// on the status codes returned by the _e variants instead.
const int gsl_handler_disabled = [] {
    gsl_set_error_handler_off();
    return 0;
}();

[[noreturn]] void fail(const char* who, double x, int status) {
    throw std::domain_error(std::string(who) + ": gsl error '" + gsl_strerror(status) +
                            "' at argument " + std::to_string(x));
}

}  // namespace

double bessel_j1(double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel_j1: non-finite argument");
    gsl_sf_result r;
    const int status = gsl_sf_bessel_J1_e(x, &r);
    if (status != GSL_SUCCESS) fail("bessel_j1", x, status);
    return r.val;
}

double bessel_i0_scaled(double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel_i0_scaled: non-finite argument");
    gsl_sf_result r;
    const int status = gsl_sf_bessel_I0_scaled_e(x, &r);
    if (status != GSL_SUCCESS) fail("bessel_i0_scaled", x, status);
    return r.val;
}

double bessel_i1_scaled(double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel_i1_scaled: non-finite argument");
    gsl_sf_result r;
    const int status = gsl_sf_bessel_I1_scaled_e(x, &r);
    if (status != GSL_SUCCESS) fail("bessel_i1_scaled", x, status);
    return r.val;
}

double bessel_k_half(int m, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("bessel_k_half: argument must be positive and finite");
    }
    // K_{-nu} = K_{nu}; map order m - 1/2 to its absolute value.
    const double nu = std::abs(static_cast<double>(m) - 0.5);
    gsl_sf_result r;
    const int status = gsl_sf_bessel_Knu_e(nu, x, &r);
    if (status == GSL_EOVRFLW) return std::numeric_limits<double>::infinity();
    if (status != GSL_SUCCESS) fail("bessel_k_half", x, status);
    return r.val;
}

double phi_shape(double u) {
    if (!std::isfinite(u)) throw std::domain_error("phi_shape: non-finite argument");
    if (std::abs(u) < 1e-4) {
        // Power series sum_k (-u)^k / (k! (k+1)!); four terms give full
        // double precision on this range.
        return 1.0 + u * (-0.5 + u * (1.0 / 12.0 + u * (-1.0 / 144.0 + u / 2880.0)));
    }
    if (u > 0.0) {
        const double s = std::sqrt(u);
        return bessel_j1(2.0 * s) / s;
    }
    const double s = std::sqrt(-u);
    gsl_sf_result r;
    const int status = gsl_sf_bessel_I1_scaled_e(2.0 * s, &r);
    if (status != GSL_SUCCESS) fail("phi_shape", u, status);
    const double scaled = r.val / s;  // e^{-2s} I1(2s)/s
    if (2.0 * s > 700.0) {
        throw std::domain_error("phi_shape: argument too negative, result overflows");
    }
    return scaled * std::exp(2.0 * s);
}

}  // namespace qmemsim
