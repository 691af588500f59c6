#include "pon/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace pon {
namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex plan_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan> plan_cache;

fftw_plan get_plan(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end())
        return it->second;
    // Planned once per (size, direction) with FFTW_ESTIMATE so results are
    // repeatable run to run; executed later via fftw_execute_dft on the
    // caller's buffer.
    std::vector<cplx> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE);
    if (!p)
        throw std::runtime_error("fft: planning failed");
    plan_cache.emplace(key, p);
    return p;
}

}  // namespace

void fft_forward(std::vector<cplx>& x) {
    if (x.empty())
        return;
    fftw_plan p = get_plan(x.size(), FFTW_FORWARD);
    auto* buf = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(p, buf, buf);
}

void fft_inverse(std::vector<cplx>& x) {
    if (x.empty())
        return;
    fftw_plan p = get_plan(x.size(), FFTW_BACKWARD);
    auto* buf = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(p, buf, buf);
    const double inv = 1.0 / static_cast<double>(x.size());
    for (auto& v : x)
        v *= inv;
}

}  // namespace pon
