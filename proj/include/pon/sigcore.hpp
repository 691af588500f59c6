// Numeric foundations: RRC pulse design, full and sparse DFTs, frequency
// shifting, ideal fractional delay, and AWGN. Everything here is a pure
// function of its inputs.

#pragma once

#include <cstddef>
#include <vector>

#include "pon/rng.hpp"
#include "pon/signal.hpp"

namespace pon {

struct RrcFilter {
    double roll_off = 0.0;
    int sps = 1;            // samples per symbol
    int span_symbols = 0;   // filter length in symbols
    std::vector<double> taps;  // span_symbols*sps + 1 taps, unit energy, symmetric
};

// Root-raised-cosine taps; the removable singularities of the closed form are
// evaluated by their analytic limits. roll_off in [0,1], sps >= 1,
// span_symbols even and >= 2.
RrcFilter rrc_design(double roll_off, int sps, int span_symbols);

// Forward DFT, bin k = sum_n x[n] exp(-j 2 pi k n / N). Unnormalized.
std::vector<cplx> dft_full(const std::vector<cplx>& x);

// Inverse of dft_full (carries the 1/N factor).
std::vector<cplx> idft_full(const std::vector<cplx>& x);

// Selected bins of the forward DFT, each evaluated directly from its defining
// sum (cost K*N complex multiplications). Bins must lie in [0, N).
std::vector<cplx> dft_sparse(const std::vector<cplx>& x, const std::vector<std::size_t>& bins);

// Reusable sparse-DFT evaluator: twiddles for a fixed (N, bin set) are built
// once so the per-block cost is exactly K*N complex multiplications. Used by
// the timing loop; dft_sparse() wraps it for one-shot calls.
class SparseDft {
  public:
    SparseDft(std::size_t n, std::vector<std::size_t> bins);

    // x must point at n samples.
    std::vector<cplx> evaluate(const cplx* x) const;

    std::size_t size_n() const { return n_; }
    const std::vector<std::size_t>& bins() const { return bins_; }

  private:
    std::size_t n_;
    std::vector<std::size_t> bins_;
    std::vector<cplx> twiddles_;  // bins.size() rows of n
};

// y[n] = x[n] exp(+j 2 pi f n / fs). Requires |f| < fs/2.
ComplexWaveform freq_shift(const ComplexWaveform& x, double f_shift_hz);

// Ideal integer-factor upsampling by spectral zero padding (circular).
// Sample values at the original instants are preserved.
ComplexWaveform upsample_integer(const ComplexWaveform& x, int factor);

// Circular fractional delay by d samples: multiplies the full spectrum by
// exp(-j 2 pi f d / fs) over signed bin frequencies. Length must be >= 8.
ComplexWaveform ideal_fractional_delay(const ComplexWaveform& x, double delay_samples);

// Additive circular complex Gaussian noise at the requested SNR relative to
// the measured signal power. snr_db = +inf means no noise.
ComplexWaveform awgn(const ComplexWaveform& x, double snr_db, Rng& rng);

}  // namespace pon
