#include "qmemsim/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace qmemsim::fft {

namespace {

struct PlanEntry {
    fftw_complex* buf = nullptr;
    fftw_plan plus = nullptr;   // e^{+2 pi i j k / n} kernel
    fftw_plan minus = nullptr;  // e^{-2 pi i j k / n} kernel
    std::size_t n = 0;

    PlanEntry() = default;
    PlanEntry(const PlanEntry&) = delete;
    PlanEntry& operator=(const PlanEntry&) = delete;

    ~PlanEntry() {
        if (plus) fftw_destroy_plan(plus);
        if (minus) fftw_destroy_plan(minus);
        if (buf) fftw_free(buf);
    }
};

std::mutex cache_mutex;
std::map<std::size_t, PlanEntry>& cache() {
    static std::map<std::size_t, PlanEntry> c;
    return c;
}

PlanEntry& entry_for(std::size_t n) {
    auto& c = cache();
    auto it = c.find(n);
    if (it != c.end()) return it->second;
    PlanEntry& e = c[n];
    e.n = n;
    e.buf = fftw_alloc_complex(n);
    if (!e.buf) throw std::bad_alloc();
    const int ni = static_cast<int>(n);
    // FFTW_BACKWARD is the e^{+i...} kernel, FFTW_FORWARD the e^{-i...} one.
    e.plus = fftw_plan_dft_1d(ni, e.buf, e.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    e.minus = fftw_plan_dft_1d(ni, e.buf, e.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    if (!e.plus || !e.minus) throw std::runtime_error("fft: plan creation failed");
    return e;
}

void run(std::vector<std::complex<double>>& data, bool plus_kernel) {
    if (data.empty()) throw std::invalid_argument("fft: empty input");
    if (data.size() > static_cast<std::size_t>(1) << 28) {
        throw std::invalid_argument("fft: size too large");
    }
    std::lock_guard<std::mutex> lock(cache_mutex);
    PlanEntry& e = entry_for(data.size());
    // std::complex<double> is layout-compatible with fftw_complex.
    std::memcpy(e.buf, static_cast<const void*>(data.data()),
                data.size() * sizeof(fftw_complex));
    fftw_execute(plus_kernel ? e.plus : e.minus);
    std::memcpy(static_cast<void*>(data.data()), e.buf, data.size() * sizeof(fftw_complex));
}

}  // namespace

void forward(std::vector<std::complex<double>>& data) { run(data, true); }
void backward(std::vector<std::complex<double>>& data) { run(data, false); }

}  // namespace qmemsim::fft
