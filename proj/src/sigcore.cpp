#include "pon/sigcore.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pon/fft.hpp"

namespace pon {

namespace {
constexpr double kPi = std::numbers::pi;
}

RrcFilter rrc_design(double roll_off, int sps, int span_symbols) {
    if (roll_off < 0.0 || roll_off > 1.0)
        throw std::invalid_argument("rrc_design: roll_off must be in [0,1]");
    if (sps < 1)
        throw std::invalid_argument("rrc_design: sps must be >= 1");
    if (span_symbols < 2 || span_symbols % 2 != 0)
        throw std::invalid_argument("rrc_design: span_symbols must be even and >= 2");

    const int n = span_symbols * sps + 1;
    const double b = roll_off;
    std::vector<double> h(n);
    for (int k = 0; k < n; ++k) {
        const double t = (k - (n - 1) / 2.0) / sps;  // in symbols
        if (std::abs(t) < 1e-12) {
            h[k] = 1.0 - b + 4.0 * b / kPi;
        } else if (b > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
            // t = +-T/(4*beta): evaluate the removable singularity by its limit
            h[k] = (b / std::sqrt(2.0)) * ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * b)) +
                                           (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * b)));
        } else {
            const double num =
                std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b));
            const double den = kPi * t * (1.0 - 16.0 * b * b * t * t);
            h[k] = num / den;
        }
    }
    double e = 0.0;
    for (double v : h)
        e += v * v;
    const double g = 1.0 / std::sqrt(e);
    for (double& v : h)
        v *= g;

    return RrcFilter{roll_off, sps, span_symbols, std::move(h)};
}

std::vector<cplx> dft_full(const std::vector<cplx>& x) {
    if (x.size() < 2)
        throw std::invalid_argument("dft_full: need at least 2 samples");
    std::vector<cplx> out(x);
    fft_forward(out);
    return out;
}

std::vector<cplx> idft_full(const std::vector<cplx>& x) {
    if (x.size() < 2)
        throw std::invalid_argument("idft_full: need at least 2 samples");
    std::vector<cplx> out(x);
    fft_inverse(out);
    return out;
}

SparseDft::SparseDft(std::size_t n, std::vector<std::size_t> bins)
    : n_(n), bins_(std::move(bins)) {
    for (std::size_t k : bins_)
        if (k >= n_)
            throw std::invalid_argument("dft_sparse: bin index out of range");
    twiddles_.resize(bins_.size() * n_);
    for (std::size_t r = 0; r < bins_.size(); ++r) {
        for (std::size_t i = 0; i < n_; ++i) {
            // k*i reduced mod n before the trig call to keep full precision
            const double ang = -2.0 * kPi * static_cast<double>((bins_[r] * i) % n_) /
                               static_cast<double>(n_);
            twiddles_[r * n_ + i] = cplx(std::cos(ang), std::sin(ang));
        }
    }
}

std::vector<cplx> SparseDft::evaluate(const cplx* x) const {
    std::vector<cplx> out(bins_.size());
    for (std::size_t r = 0; r < bins_.size(); ++r) {
        const cplx* w = &twiddles_[r * n_];
        double acc_re = 0.0, acc_im = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double xr = x[i].real(), xi = x[i].imag();
            const double wr = w[i].real(), wi = w[i].imag();
            acc_re += xr * wr - xi * wi;
            acc_im += xr * wi + xi * wr;
        }
        out[r] = cplx(acc_re, acc_im);
    }
    return out;
}

std::vector<cplx> dft_sparse(const std::vector<cplx>& x, const std::vector<std::size_t>& bins) {
    return SparseDft(x.size(), bins).evaluate(x.data());
}

ComplexWaveform freq_shift(const ComplexWaveform& x, double f_shift_hz) {
    if (std::abs(f_shift_hz) >= x.sample_rate_hz / 2.0)
        throw std::invalid_argument("freq_shift: shift beyond Nyquist");
    ComplexWaveform y = x;
    const double w = 2.0 * kPi * f_shift_hz / x.sample_rate_hz;
    // Rotator recurrence with periodic renormalization to hold |rot| = 1.
    const cplx step(std::cos(w), std::sin(w));
    cplx rot(1.0, 0.0);
    for (std::size_t n = 0; n < y.samples.size(); ++n) {
        y.samples[n] *= rot;
        rot *= step;
        if ((n & 0x3ff) == 0x3ff)
            rot /= std::abs(rot);
    }
    return y;
}

ComplexWaveform upsample_integer(const ComplexWaveform& x, int factor) {
    if (factor < 1)
        throw std::invalid_argument("upsample_integer: factor must be >= 1");
    if (factor == 1 || x.samples.empty())
        return ComplexWaveform{x.samples, x.sample_rate_hz * factor};
    std::vector<cplx> spec(x.samples);
    fft_forward(spec);
    const std::size_t n = spec.size();
    std::vector<cplx> padded(n * static_cast<std::size_t>(factor), cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        // negative-frequency bins (including Nyquist for even n) move to the tail
        const std::size_t pos = (2 * k < n) ? k : k + n * (static_cast<std::size_t>(factor) - 1);
        padded[pos] = spec[k];
    }
    fft_inverse(padded);
    const double g = static_cast<double>(factor);
    for (auto& v : padded)
        v *= g;
    return ComplexWaveform{std::move(padded), x.sample_rate_hz * factor};
}

ComplexWaveform ideal_fractional_delay(const ComplexWaveform& x, double delay_samples) {
    if (!std::isfinite(delay_samples))
        throw std::invalid_argument("ideal_fractional_delay: delay must be finite");
    if (x.samples.size() < 8)
        throw std::invalid_argument("ideal_fractional_delay: waveform too short");
    std::vector<cplx> spec(x.samples);
    fft_forward(spec);
    const std::size_t n = spec.size();
    for (std::size_t k = 0; k < n; ++k) {
        // f in cycles/sample, signed
        const double f = bin_freq_hz(k, n, 1.0);
        const double ang = -2.0 * kPi * f * delay_samples;
        spec[k] *= cplx(std::cos(ang), std::sin(ang));
    }
    fft_inverse(spec);
    return ComplexWaveform{std::move(spec), x.sample_rate_hz};
}

ComplexWaveform awgn(const ComplexWaveform& x, double snr_db, Rng& rng) {
    if (std::isinf(snr_db) && snr_db > 0.0)
        return x;  // noise disabled
    const double p = mean_power(x);
    if (p <= 0.0)
        throw std::invalid_argument("awgn: zero-power input");
    const double sigma2 = p / std::pow(10.0, snr_db / 10.0);
    const double s = std::sqrt(sigma2 / 2.0);  // per real dimension
    ComplexWaveform y = x;
    for (auto& v : y.samples) {
        const double re = rng.next_gaussian();
        const double im = rng.next_gaussian();
        v += cplx(s * re, s * im);
    }
    return y;
}

}  // namespace pon
