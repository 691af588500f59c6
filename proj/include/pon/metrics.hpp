// Quantitative evaluation: timing-error variance, convergence time, EVM, and
// the complex-multiplication accounting behind the complexity comparison.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pon/rxdsp.hpp"
#include "pon/signal.hpp"

namespace pon {

// Sample variance (n-1 normalization) of the raw per-block errors after
// discarding the first discard_blocks entries.
double timing_error_variance(const TimingTrace& trace, std::size_t discard_blocks = 200);

// First block index after which |accumulated - true| < tol for `window`
// consecutive blocks; nullopt if that never happens.
std::optional<std::size_t> convergence_time(const TimingTrace& trace, double tol_symbols,
                                            std::size_t window = 20);

// Error vector magnitude in dB after integer-delay alignment (cross
// correlation) and complex least-squares gain fit. Identical inputs give
// -infinity.
double evm_db(const std::vector<cplx>& recovered_symbols,
              const std::vector<cplx>& reference_symbols);

struct ComplexityReport {
    std::size_t dft_size_n = 0;
    std::size_t k_points = 0;
    // proposed path: sparse band-edge DFT + per-bin CD multiply + correlation
    std::int64_t sparse_dft = 0;
    std::int64_t sparse_cd_mult = 0;
    std::int64_t sparse_corr = 0;
    std::int64_t sparse_total = 0;
    // full-compensation baseline: FFT + full-width CD multiply + inverse FFT,
    // then the timing stage re-extracts its K bins from the time signal
    std::int64_t full_fft = 0;
    std::int64_t full_cd_mult = 0;
    std::int64_t full_ifft = 0;
    std::int64_t full_reextract = 0;
    std::int64_t full_corr = 0;
    std::int64_t full_total = 0;
    // the sparse transform alone beats an FFT only for K < log2(N)
    bool sparse_transform_exceeds_fft = false;
};

// Analytic per-block complex-multiplication counts for both pipelines.
// Requires power-of-two N.
ComplexityReport complexity_report(const TimingLoopConfig& cfg);

std::string format_complexity(const ComplexityReport& r);

}  // namespace pon
