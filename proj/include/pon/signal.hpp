// Complex baseband waveform container shared by every stage of the chain.

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace pon {

using cplx = std::complex<double>;

struct ComplexWaveform {
    std::vector<cplx> samples;
    double sample_rate_hz = 0.0;

    ComplexWaveform() = default;
    ComplexWaveform(std::vector<cplx> s, double fs) : samples(std::move(s)), sample_rate_hz(fs) {
        if (fs <= 0.0)
            throw std::invalid_argument("ComplexWaveform: sample_rate_hz must be > 0");
    }

    std::size_t size() const { return samples.size(); }
};

// Sum of |x|^2 over all samples.
inline double energy(const ComplexWaveform& x) {
    double e = 0.0;
    for (const auto& s : x.samples)
        e += std::norm(s);
    return e;
}

// Mean |x|^2 per sample; 0 for an empty waveform.
inline double mean_power(const ComplexWaveform& x) {
    return x.samples.empty() ? 0.0 : energy(x) / static_cast<double>(x.samples.size());
}

}  // namespace pon
