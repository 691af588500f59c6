// Thin FFTW3 wrapper with cached plans. Forward transform is unnormalized,
// the inverse carries 1/N, matching the DFT convention used project-wide.

#pragma once

#include <vector>

#include "pon/signal.hpp"

namespace pon {

// In-place transforms. Any length >= 1 is accepted.
void fft_forward(std::vector<cplx>& x);
void fft_inverse(std::vector<cplx>& x);  // includes the 1/N factor

// Signed frequency of bin k for an n-point transform at rate fs:
// k in [0, n/2] maps to +k*fs/n except k = n/2 which maps to -fs/2.
inline double bin_freq_hz(std::size_t k, std::size_t n, double fs) {
    const auto ks = static_cast<long long>(k);
    const auto ns = static_cast<long long>(n);
    return (2 * ks < ns ? static_cast<double>(ks) : static_cast<double>(ks - ns)) * fs /
           static_cast<double>(ns);
}

}  // namespace pon
