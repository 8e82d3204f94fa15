#include "uwoam/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace uwoam::fft {

namespace {

// One cached in-place plan pair per transform size. FFTW_ESTIMATE keeps
// planning deterministic; plans are reused via the new-array interface.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_mutex;
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}

PlanPair& plans_for(int n) {
    std::lock_guard<std::mutex> lock(g_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> tmp(static_cast<size_t>(n) * n);
    auto* buf = reinterpret_cast<fftw_complex*>(tmp.data());
    PlanPair p;
    // FFTW_UNALIGNED: plans are executed on caller arrays whose alignment
    // is not under our control.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.fwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, flags);
    p.bwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, flags);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fftw planning failed");
    return cache.emplace(n, p).first->second;
}

void execute(fftw_plan plan, std::vector<std::complex<double>>& a, int n) {
    if (a.size() != static_cast<size_t>(n) * n)
        throw std::invalid_argument("fft: array size does not match n*n");
    auto* buf = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void forward(std::vector<std::complex<double>>& a, int n) { execute(plans_for(n).fwd, a, n); }

void backward_raw(std::vector<std::complex<double>>& a, int n) { execute(plans_for(n).bwd, a, n); }

void inverse(std::vector<std::complex<double>>& a, int n) {
    backward_raw(a, n);
    const double s = 1.0 / (static_cast<double>(n) * n);
    for (auto& v : a) v *= s;
}

}  // namespace uwoam::fft
