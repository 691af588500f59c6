// OLT-side transmitter: PRBS bits -> 16QAM -> RRC shaping -> DSCM mux ->
// per-slot CD pre-compensation. Subcarriers are shaped directly at the
// aggregate rate (integer sps per subcarrier), then shifted and summed.

#pragma once

#include <cstdint>
#include <vector>

#include "pon/channel.hpp"
#include "pon/rng.hpp"
#include "pon/sigcore.hpp"
#include "pon/signal.hpp"

namespace pon {

struct DscmPlan {
    int n_subcarriers = 1;
    double baud_per_sc_hz = 64e9;
    double roll_off = 0.1;
    std::vector<double> sc_center_freqs_hz;  // symmetric about 0
    double aggregate_sample_rate_hz = 128e9;
};

// Plan with spacing = baud * (1 + roll_off) and centers symmetric about 0 Hz.
// n_subcarriers * baud is the total capacity (64 GBd for the stock configs).
DscmPlan make_dscm_plan(int n_subcarriers, double baud_per_sc_hz, double roll_off = 0.1,
                        double aggregate_sample_rate_hz = 128e9);

struct SymbolFrame {
    std::vector<cplx> symbols;   // unit average power 16QAM
    std::vector<std::uint8_t> bits;
};

struct SlotEntry {
    int subcarrier_index = 0;
    std::int64_t duration_symbols = 0;
    double target_onu_distance_km = 0.0;
};

struct SlotSchedule {
    std::vector<SlotEntry> slots;
};

// Slot boundaries on the aggregate sample axis, with the distance each slot
// was pre-compensated for. Ground truth for receiver-side residual-CD lookup.
struct SlotMetadata {
    std::size_t start_sample = 0;
    std::size_t end_sample = 0;
    double precomp_distance_km = 0.0;
};

// Uniform i.i.d. bits; n_bits must be a multiple of 4 (16QAM).
std::vector<std::uint8_t> prbs_bits(Rng& rng, std::size_t n_bits);

// Gray-coded square 16QAM, rails {-3,-1,+1,+3}/sqrt(10); b0 b1 -> I, b2 b3 -> Q,
// Gray order 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
SymbolFrame map_16qam(std::vector<std::uint8_t> bits);

// Zero-stuff to sps samples/symbol and convolve with the RRC taps (evaluated
// in polyphase form). Output length = n_symbols*sps + taps - 1.
ComplexWaveform shape_and_upsample(const SymbolFrame& frame, const RrcFilter& filt, int sps,
                                   double baud_hz);

// Shift each subcarrier waveform (already at the aggregate rate) to its
// center frequency and sum.
ComplexWaveform dscm_mux(const std::vector<ComplexWaveform>& sc_waveforms, const DscmPlan& plan);

// Inverse CD all-pass at absolute frequency sc_center + baseband offset.
ComplexWaveform cd_precompensate(const ComplexWaveform& x, const FiberSpec& fiber,
                                 double distance_km, double sc_center_hz = 0.0);

// Per-slot PRBS payloads on the scheduled subcarrier, each slot pre-compensated
// for its target ONU distance. Other subcarriers stay dark; slot boundaries
// partition the sample axis exactly.
std::pair<ComplexWaveform, std::vector<SlotMetadata>> build_slotted_stream(
    const SlotSchedule& schedule, const DscmPlan& plan, const FiberSpec& fiber, Rng& rng,
    int rrc_span_symbols = 32);

}  // namespace pon
