#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qmemsim::fft {

// In-place-style FFT wrappers around FFTW with an internal per-size plan
// cache.  "forward" uses the e^{+i 2 pi j k / n} kernel, "backward" the
// e^{-i 2 pi j k / n} kernel; neither normalizes.  Thread safe.
void forward(std::vector<std::complex<double>>& data);
void backward(std::vector<std::complex<double>>& data);

}  // namespace qmemsim::fft
