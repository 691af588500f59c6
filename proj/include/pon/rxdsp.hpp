// ONU-side receiver: subcarrier downconversion to 2 samples/symbol, sparse
// band-edge DFT, in-loop frequency-domain CD compensation of just those bins,
// Godard timing-error detection, PI loop filter and Farrow interpolation.
//
// Mode map: `proposed` compensates only the K band-edge bins; `full_comp`
// CD-compensates the whole block spectrum before reading the same bins;
// `no_comp` uses the raw bins.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pon/channel.hpp"
#include "pon/sigcore.hpp"
#include "pon/signal.hpp"
#include "pon/txchain.hpp"

namespace pon {

enum class TimingMode { proposed, no_comp, full_comp };

const char* to_string(TimingMode m);
std::optional<TimingMode> timing_mode_from_string(const std::string& s);

struct TimingLoopConfig {
    std::size_t dft_size_n = 128;   // power of two, multiple of 4
    std::size_t k_points = 12;      // even, <= N/2
    double roll_off = 0.1;
    int sps = 2;                    // the Godard pairing below assumes 2
    FiberSpec residual_cd;          // assumed residual dispersion (length_km = 0 -> none)
    double sc_center_freq_hz = 0.0;
    TimingMode mode = TimingMode::proposed;
    double kp = 0.05;
    double ki = 1e-3;
    std::size_t block_stride = 0;   // 0 -> dft_size_n (non-overlapping)
    double hold_threshold_rel = 0.02;  // |S| below this fraction of bin energy -> hold
    std::size_t lock_window = 20;
    double lock_tol_symbols = 0.02;
};

struct TimingLoopState {
    double mu = 0.0;                 // fractional delay in samples, [0,1)
    std::int64_t basepoint = 0;      // absolute sample index of the block start
    double integrator = 0.0;
    std::int64_t block_index = 0;
    bool locked = false;
    // net basepoint adjustment from mu wraps since state creation; together
    // with mu this carries the accumulated timing correction across segments
    std::int64_t wrap_offset = 0;
    std::vector<double> err_window;  // ring buffer for the lock detector
    std::size_t err_pos = 0;
    std::size_t err_count = 0;
};

struct TimingTrace {
    std::vector<double> raw_error_symbols;
    std::vector<double> accumulated_phase_symbols;
    std::vector<double> true_phase_symbols;
    std::vector<std::uint8_t> locked;
    std::vector<std::uint8_t> held;
};

// Band-edge bin sets for an N-point DFT at 2 samples/symbol. The upper set
// holds K/2 consecutive bins centered on N/4 (+half-baud); the lower set is
// the upper set shifted by N/2 (mod N), so pair i is spaced by exactly the
// symbol rate.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> bandedge_bins(std::size_t n,
                                                                            std::size_t k_points);

// Signed baseband frequencies of the given bins at sample rate fs.
std::vector<double> bin_frequencies_hz(const std::vector<std::size_t>& bins, std::size_t n,
                                       double fs);

// Multiply each bin by exp(+j phi(sc_center + f_i)) for the assumed residual.
// Only these K values are touched; no time-domain signal is produced.
std::vector<cplx> inloop_cd_comp(const std::vector<cplx>& bins,
                                 const std::vector<double>& bin_freqs_hz,
                                 const FiberSpec& residual, double sc_center_hz);

struct GodardResult {
    double error_symbols = 0.0;   // arg(S)/2pi, in (-0.5, 0.5]
    double correlation_mag = 0.0; // |S|
    double bin_energy = 0.0;      // mean of upper/lower bin energies
};

// S = sum_i upper[i] * conj(lower[i]); error = arg(S)/(2pi) in symbols.
GodardResult godard_ted(const std::vector<cplx>& upper, const std::vector<cplx>& lower);

// Cubic Lagrange interpolation over x[basepoint-1 .. basepoint+2], evaluated
// at basepoint + mu with mu in [0,1).
cplx farrow_interpolate(const std::vector<cplx>& x, std::size_t basepoint, double mu);

// One PI update; wraps mu into [0,1) adjusting basepoint, refreshes the lock
// detector. Throws on non-finite error input (loop fault).
void loop_step(TimingLoopState& state, double error_symbols, const TimingLoopConfig& cfg);

// Frequency-shift subcarrier sc_index to 0 Hz, matched-filter with the RRC,
// decimate to exactly 2 samples/symbol.
ComplexWaveform subcarrier_downconvert(const ComplexWaveform& aggregate, const DscmPlan& plan,
                                       int sc_index, int rrc_span_symbols = 32);

struct TimingRunResult {
    ComplexWaveform recovered;  // interpolated blocks at the recovered phase
    TimingTrace trace;
    TimingLoopState state;
};

// Block-by-block timing recovery over x[start_sample, end_sample). true_phase
// (may be empty) is sampled at each block's basepoint for the trace. Passing
// a prior state continues a run across segments, e.g. TDM slots.
TimingRunResult run_timing_recovery(const ComplexWaveform& x, const TimingLoopConfig& cfg,
                                    const std::function<double(std::size_t)>& true_phase,
                                    std::size_t start_sample = 0, std::size_t end_sample = 0,
                                    const TimingLoopState* initial_state = nullptr,
                                    bool collect_recovered = false);

}  // namespace pon
