#include "pon/txchain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pon {

namespace {

const double kQamScale = 1.0 / std::sqrt(10.0);
// Gray order 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3, indexed by the 2-bit value
const double kGrayRail[4] = {-3.0, -1.0, +3.0, +1.0};

int integer_factor(double num, double den) {
    const double f = num / den;
    const auto r = static_cast<int>(std::llround(f));
    if (r < 1 || std::abs(f - static_cast<double>(r)) > 1e-9)
        return 0;
    return r;
}

}  // namespace

DscmPlan make_dscm_plan(int n_subcarriers, double baud_per_sc_hz, double roll_off,
                        double aggregate_sample_rate_hz) {
    if (n_subcarriers < 1)
        throw std::invalid_argument("make_dscm_plan: need at least one subcarrier");
    if (baud_per_sc_hz <= 0.0)
        throw std::invalid_argument("make_dscm_plan: baud must be > 0");
    if (roll_off < 0.0 || roll_off > 1.0)
        throw std::invalid_argument("make_dscm_plan: roll_off must be in [0,1]");
    const double spacing = baud_per_sc_hz * (1.0 + roll_off);
    if (aggregate_sample_rate_hz < n_subcarriers * spacing)
        throw std::invalid_argument("make_dscm_plan: aggregate rate below total bandwidth");
    if (integer_factor(aggregate_sample_rate_hz, baud_per_sc_hz) < 2)
        throw std::invalid_argument(
            "make_dscm_plan: aggregate rate must be an integer multiple (>= 2) of the baud");
    DscmPlan plan;
    plan.n_subcarriers = n_subcarriers;
    plan.baud_per_sc_hz = baud_per_sc_hz;
    plan.roll_off = roll_off;
    plan.aggregate_sample_rate_hz = aggregate_sample_rate_hz;
    plan.sc_center_freqs_hz.resize(n_subcarriers);
    for (int i = 0; i < n_subcarriers; ++i)
        plan.sc_center_freqs_hz[i] = (i - (n_subcarriers - 1) / 2.0) * spacing;
    return plan;
}

std::vector<std::uint8_t> prbs_bits(Rng& rng, std::size_t n_bits) {
    if (n_bits % 4 != 0)
        throw std::invalid_argument("prbs_bits: n_bits must be a multiple of 4");
    std::vector<std::uint8_t> bits(n_bits);
    for (auto& b : bits)
        b = static_cast<std::uint8_t>(rng.next_bit());
    return bits;
}

SymbolFrame map_16qam(std::vector<std::uint8_t> bits) {
    if (bits.size() % 4 != 0)
        throw std::invalid_argument("map_16qam: bit count must be a multiple of 4");
    SymbolFrame frame;
    frame.symbols.resize(bits.size() / 4);
    for (std::size_t s = 0; s < frame.symbols.size(); ++s) {
        const int i_idx = (bits[4 * s] << 1) | bits[4 * s + 1];
        const int q_idx = (bits[4 * s + 2] << 1) | bits[4 * s + 3];
        frame.symbols[s] = cplx(kGrayRail[i_idx], kGrayRail[q_idx]) * kQamScale;
    }
    frame.bits = std::move(bits);
    return frame;
}

ComplexWaveform shape_and_upsample(const SymbolFrame& frame, const RrcFilter& filt, int sps,
                                   double baud_hz) {
    if (filt.sps != sps)
        throw std::invalid_argument("shape_and_upsample: filter sps does not match");
    if (baud_hz <= 0.0)
        throw std::invalid_argument("shape_and_upsample: baud must be > 0");
    const auto n_sym = frame.symbols.size();
    const auto taps = filt.taps.size();
    const std::size_t n_out = n_sym * static_cast<std::size_t>(sps) + taps - 1;
    std::vector<cplx> out(n_out);
    // polyphase evaluation of the zero-stuffed convolution: for output m only
    // symbol positions j = s*sps with 0 <= m-j < taps contribute
    const auto spsu = static_cast<std::size_t>(sps);
    for (std::size_t m = 0; m < n_out; ++m) {
        const std::size_t s_hi = std::min(m / spsu, n_sym - 1);
        const std::size_t m_min = (m >= taps - 1) ? m - (taps - 1) : 0;
        std::size_t s_lo = (m_min + spsu - 1) / spsu;
        double acc_re = 0.0, acc_im = 0.0;
        for (std::size_t s = s_lo; s <= s_hi; ++s) {
            const double h = filt.taps[m - s * spsu];
            acc_re += h * frame.symbols[s].real();
            acc_im += h * frame.symbols[s].imag();
        }
        out[m] = cplx(acc_re, acc_im);
    }
    return ComplexWaveform{std::move(out), baud_hz * sps};
}

ComplexWaveform dscm_mux(const std::vector<ComplexWaveform>& sc_waveforms, const DscmPlan& plan) {
    if (static_cast<int>(sc_waveforms.size()) != plan.n_subcarriers)
        throw std::invalid_argument("dscm_mux: waveform count does not match the plan");
    const double fs = plan.aggregate_sample_rate_hz;
    std::size_t n_agg = 0;
    std::vector<ComplexWaveform> at_rate;
    at_rate.reserve(sc_waveforms.size());
    for (const auto& w : sc_waveforms) {
        const int factor = integer_factor(fs, w.sample_rate_hz);
        if (factor == 0)
            throw std::invalid_argument("dscm_mux: non-integer resampling factor");
        at_rate.push_back(factor == 1 ? w : upsample_integer(w, factor));
        n_agg = std::max(n_agg, at_rate.back().samples.size());
    }
    std::vector<cplx> sum(n_agg, cplx(0.0, 0.0));
    for (int i = 0; i < plan.n_subcarriers; ++i) {
        const ComplexWaveform shifted = freq_shift(at_rate[static_cast<std::size_t>(i)],
                                                   plan.sc_center_freqs_hz[static_cast<std::size_t>(i)]);
        for (std::size_t n = 0; n < shifted.samples.size(); ++n)
            sum[n] += shifted.samples[n];
    }
    return ComplexWaveform{std::move(sum), fs};
}

ComplexWaveform cd_precompensate(const ComplexWaveform& x, const FiberSpec& fiber,
                                 double distance_km, double sc_center_hz) {
    if (distance_km < 0.0)
        throw std::invalid_argument("cd_precompensate: distance must be >= 0");
    if (distance_km == 0.0)
        return x;
    FiberSpec f = fiber;
    f.length_km = distance_km;
    return compensate_cd(x, f, sc_center_hz);
}

std::pair<ComplexWaveform, std::vector<SlotMetadata>> build_slotted_stream(
    const SlotSchedule& schedule, const DscmPlan& plan, const FiberSpec& fiber, Rng& rng,
    int rrc_span_symbols) {
    if (schedule.slots.empty())
        throw std::invalid_argument("build_slotted_stream: empty schedule");
    const double fs = plan.aggregate_sample_rate_hz;
    const int sps_tx = integer_factor(fs, plan.baud_per_sc_hz);
    if (sps_tx < 2)
        throw std::invalid_argument("build_slotted_stream: aggregate rate not an integer "
                                    "multiple of the baud");
    const RrcFilter filt = rrc_design(plan.roll_off, sps_tx, rrc_span_symbols);
    const std::size_t half_taps = (filt.taps.size() - 1) / 2;

    std::size_t total = 0;
    for (const auto& slot : schedule.slots) {
        if (slot.duration_symbols <= 0)
            throw std::invalid_argument("build_slotted_stream: slot duration must be > 0");
        if (slot.subcarrier_index < 0 || slot.subcarrier_index >= plan.n_subcarriers)
            throw std::invalid_argument("build_slotted_stream: subcarrier index out of range");
        total += static_cast<std::size_t>(slot.duration_symbols) *
                 static_cast<std::size_t>(sps_tx);
    }

    std::vector<cplx> stream(total, cplx(0.0, 0.0));
    std::vector<SlotMetadata> metadata;
    metadata.reserve(schedule.slots.size());
    std::size_t cursor = 0;
    for (const auto& slot : schedule.slots) {
        const auto n_sym = static_cast<std::size_t>(slot.duration_symbols);
        const std::size_t n_samp = n_sym * static_cast<std::size_t>(sps_tx);
        SymbolFrame frame = map_16qam(prbs_bits(rng, n_sym * 4));
        ComplexWaveform shaped = shape_and_upsample(frame, filt, sps_tx, plan.baud_per_sc_hz);
        // take the filter-delay-centered span so the slot holds its own symbols
        std::vector<cplx> seg(shaped.samples.begin() + static_cast<std::ptrdiff_t>(half_taps),
                              shaped.samples.begin() + static_cast<std::ptrdiff_t>(half_taps + n_samp));
        ComplexWaveform payload{std::move(seg), fs};
        const double f_c = plan.sc_center_freqs_hz[static_cast<std::size_t>(slot.subcarrier_index)];
        if (slot.target_onu_distance_km > 0.0)
            payload = cd_precompensate(payload, fiber, slot.target_onu_distance_km, f_c);
        if (f_c != 0.0)
            payload = freq_shift(payload, f_c);
        std::copy(payload.samples.begin(), payload.samples.end(),
                  stream.begin() + static_cast<std::ptrdiff_t>(cursor));
        metadata.push_back({cursor, cursor + n_samp, slot.target_onu_distance_km});
        cursor += n_samp;
    }
    return {ComplexWaveform{std::move(stream), fs}, std::move(metadata)};
}

}  // namespace pon
