#include "pon/rxdsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pon/fft.hpp"

namespace pon {

namespace {
constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

void validate_loop_config(const TimingLoopConfig& cfg) {
    if (!is_pow2(cfg.dft_size_n) || cfg.dft_size_n < 8)
        throw std::invalid_argument("TimingLoopConfig: dft_size_n must be a power of two >= 8");
    if (cfg.k_points == 0 || cfg.k_points % 2 != 0 || cfg.k_points > cfg.dft_size_n / 2)
        throw std::invalid_argument("TimingLoopConfig: k_points must be even and <= N/2");
    if (cfg.sps != 2)
        throw std::invalid_argument("TimingLoopConfig: the band-edge pairing requires sps = 2");
    if (cfg.kp <= 0.0 || cfg.ki <= 0.0)
        throw std::invalid_argument("TimingLoopConfig: kp and ki must be > 0");
}
}  // namespace

const char* to_string(TimingMode m) {
    switch (m) {
        case TimingMode::proposed: return "proposed";
        case TimingMode::no_comp: return "no_comp";
        case TimingMode::full_comp: return "full_comp";
    }
    return "?";
}

std::optional<TimingMode> timing_mode_from_string(const std::string& s) {
    if (s == "proposed") return TimingMode::proposed;
    if (s == "no_comp") return TimingMode::no_comp;
    if (s == "full_comp") return TimingMode::full_comp;
    return std::nullopt;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> bandedge_bins(
    std::size_t n, std::size_t k_points) {
    if (n % 4 != 0)
        throw std::invalid_argument("bandedge_bins: N must be a multiple of 4");
    if (k_points == 0 || k_points % 2 != 0 || k_points / 2 > n / 4)
        throw std::invalid_argument("bandedge_bins: K must be even with K/2 <= N/4");
    const std::size_t half = k_points / 2;
    const std::size_t first = n / 4 - k_points / 4;
    std::vector<std::size_t> upper(half), lower(half);
    for (std::size_t i = 0; i < half; ++i) {
        upper[i] = first + i;
        lower[i] = (upper[i] + n - n / 2) % n;  // upper - N/2 mod N
    }
    return {std::move(upper), std::move(lower)};
}

std::vector<double> bin_frequencies_hz(const std::vector<std::size_t>& bins, std::size_t n,
                                       double fs) {
    std::vector<double> f(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i)
        f[i] = bin_freq_hz(bins[i], n, fs);
    return f;
}

std::vector<cplx> inloop_cd_comp(const std::vector<cplx>& bins,
                                 const std::vector<double>& bin_freqs_hz,
                                 const FiberSpec& residual, double sc_center_hz) {
    if (bins.size() != bin_freqs_hz.size())
        throw std::invalid_argument("inloop_cd_comp: bins and frequencies must align");
    std::vector<cplx> out(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double phi = cd_phase(sc_center_hz + bin_freqs_hz[i], residual);
        out[i] = bins[i] * cplx(std::cos(phi), std::sin(phi));
    }
    return out;
}

GodardResult godard_ted(const std::vector<cplx>& upper, const std::vector<cplx>& lower) {
    if (upper.empty() || upper.size() != lower.size())
        throw std::invalid_argument("godard_ted: need equal, nonempty bin sets");
    cplx s(0.0, 0.0);
    double eu = 0.0, el = 0.0;
    for (std::size_t i = 0; i < upper.size(); ++i) {
        s += upper[i] * std::conj(lower[i]);
        eu += std::norm(upper[i]);
        el += std::norm(lower[i]);
    }
    GodardResult r;
    r.correlation_mag = std::abs(s);
    r.bin_energy = 0.5 * (eu + el);
    r.error_symbols = (r.correlation_mag > 0.0) ? std::arg(s) / (2.0 * kPi) : 0.0;
    return r;
}

cplx farrow_interpolate(const std::vector<cplx>& x, std::size_t basepoint, double mu) {
    if (basepoint < 1 || basepoint + 2 >= x.size())
        throw std::out_of_range("farrow_interpolate: 4-point neighborhood out of range");
    if (mu < 0.0 || mu >= 1.0)
        throw std::invalid_argument("farrow_interpolate: mu must be in [0,1)");
    const cplx xm1 = x[basepoint - 1];
    const cplx x0 = x[basepoint];
    const cplx x1 = x[basepoint + 1];
    const cplx x2 = x[basepoint + 2];
    const cplx c0 = x0;
    const cplx c1 = x1 - xm1 / 3.0 - x0 / 2.0 - x2 / 6.0;
    const cplx c2 = (xm1 + x1) * 0.5 - x0;
    const cplx c3 = (x2 - xm1) / 6.0 + (x0 - x1) * 0.5;
    return ((c3 * mu + c2) * mu + c1) * mu + c0;
}

void loop_step(TimingLoopState& state, double error_symbols, const TimingLoopConfig& cfg) {
    if (!std::isfinite(error_symbols))
        throw std::runtime_error("timing loop fault: non-finite error");
    state.integrator += cfg.ki * error_symbols;
    const double correction = cfg.kp * error_symbols + state.integrator;
    state.mu -= correction * cfg.sps;
    while (state.mu >= 1.0) {
        state.mu -= 1.0;
        state.basepoint += 1;
        state.wrap_offset += 1;
    }
    while (state.mu < 0.0) {
        state.mu += 1.0;
        state.basepoint -= 1;
        state.wrap_offset -= 1;
    }
    state.block_index += 1;

    if (state.err_window.size() != cfg.lock_window) {
        state.err_window.assign(cfg.lock_window, 0.0);
        state.err_pos = 0;
        state.err_count = 0;
    }
    state.err_window[state.err_pos] = std::abs(error_symbols);
    state.err_pos = (state.err_pos + 1) % cfg.lock_window;
    state.err_count = std::min(state.err_count + 1, cfg.lock_window);
    state.locked = state.err_count == cfg.lock_window &&
                   *std::max_element(state.err_window.begin(), state.err_window.end()) <
                       cfg.lock_tol_symbols;
}

ComplexWaveform subcarrier_downconvert(const ComplexWaveform& aggregate, const DscmPlan& plan,
                                       int sc_index, int rrc_span_symbols) {
    if (sc_index < 0 || sc_index >= plan.n_subcarriers)
        throw std::invalid_argument("subcarrier_downconvert: subcarrier index out of range");
    const double fs = aggregate.sample_rate_hz;
    const double dec_f = fs / (2.0 * plan.baud_per_sc_hz);
    const auto dec = static_cast<std::size_t>(std::llround(dec_f));
    if (dec < 1 || std::abs(dec_f - static_cast<double>(dec)) > 1e-9)
        throw std::invalid_argument("subcarrier_downconvert: non-integer decimation factor");

    const double f_c = plan.sc_center_freqs_hz.at(static_cast<std::size_t>(sc_index));
    ComplexWaveform shifted = (f_c != 0.0) ? freq_shift(aggregate, -f_c) : aggregate;

    // Matched RRC at the aggregate rate doubles as the anti-alias filter.
    const int sps_tx = static_cast<int>(2 * dec);
    const RrcFilter mf = rrc_design(plan.roll_off, sps_tx, rrc_span_symbols);
    const auto taps = mf.taps.size();
    const auto half = (taps - 1) / 2;
    const std::size_t n_in = shifted.samples.size();
    const std::size_t n_out = n_in / dec;

    std::vector<cplx> out(n_out);
    const cplx* x = shifted.samples.data();
    for (std::size_t m = 0; m < n_out; ++m) {
        // centered convolution: y[i] = sum_k h[k] x[i + half - k]
        const std::size_t i = m * dec;
        const std::size_t k_lo = (i + half >= n_in) ? i + half - (n_in - 1) : 0;
        const std::size_t k_hi = std::min(taps - 1, i + half);
        double acc_re = 0.0, acc_im = 0.0;
        for (std::size_t k = k_lo; k <= k_hi; ++k) {
            const cplx& v = x[i + half - k];
            acc_re += mf.taps[k] * v.real();
            acc_im += mf.taps[k] * v.imag();
        }
        out[m] = cplx(acc_re, acc_im);
    }
    return ComplexWaveform{std::move(out), fs / static_cast<double>(dec)};
}

TimingRunResult run_timing_recovery(const ComplexWaveform& x, const TimingLoopConfig& cfg,
                                    const std::function<double(std::size_t)>& true_phase,
                                    std::size_t start_sample, std::size_t end_sample,
                                    const TimingLoopState* initial_state,
                                    bool collect_recovered) {
    validate_loop_config(cfg);
    const std::size_t n = cfg.dft_size_n;
    const std::size_t stride = cfg.block_stride ? cfg.block_stride : n;
    const std::size_t end = end_sample ? std::min(end_sample, x.samples.size())
                                       : x.samples.size();
    if (start_sample < 1)
        start_sample = 1;  // farrow needs one sample of history
    if (end <= start_sample || end - start_sample < n + 3)
        throw std::invalid_argument("run_timing_recovery: span shorter than one block");

    auto [upper, lower] = bandedge_bins(n, cfg.k_points);
    std::vector<std::size_t> all_bins(upper);
    all_bins.insert(all_bins.end(), lower.begin(), lower.end());
    const SparseDft sparse(n, all_bins);
    const std::size_t half = upper.size();

    const double fs = x.sample_rate_hz;
    const std::vector<double> f_upper = bin_frequencies_hz(upper, n, fs);
    const std::vector<double> f_lower = bin_frequencies_hz(lower, n, fs);

    const bool compensate = cfg.mode != TimingMode::no_comp && cfg.residual_cd.length_km > 0.0;

    // full_comp: phases for every bin of the block spectrum
    std::vector<cplx> full_phases;
    if (cfg.mode == TimingMode::full_comp && compensate) {
        full_phases.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double phi =
                cd_phase(cfg.sc_center_freq_hz + bin_freq_hz(k, n, fs), cfg.residual_cd);
            full_phases[k] = cplx(std::cos(phi), std::sin(phi));
        }
    }

    TimingRunResult res;
    if (initial_state)
        res.state = *initial_state;
    res.state.basepoint = static_cast<std::int64_t>(start_sample) + res.state.wrap_offset;
    res.recovered.sample_rate_hz = fs;

    std::vector<cplx> block(n);
    while (true) {
        const auto bp = res.state.basepoint;
        if (bp < 1 || static_cast<std::size_t>(bp) + n + 2 > end)
            break;

        for (std::size_t i = 0; i < n; ++i)
            block[i] =
                farrow_interpolate(x.samples, static_cast<std::size_t>(bp) + i, res.state.mu);

        std::vector<cplx> u, l;
        if (cfg.mode == TimingMode::full_comp) {
            std::vector<cplx> spec = dft_full(block);
            if (compensate)
                for (std::size_t k = 0; k < n; ++k)
                    spec[k] *= full_phases[k];
            u.resize(half);
            l.resize(half);
            for (std::size_t i = 0; i < half; ++i) {
                u[i] = spec[upper[i]];
                l[i] = spec[lower[i]];
            }
        } else {
            std::vector<cplx> bins = sparse.evaluate(block.data());
            u.assign(bins.begin(), bins.begin() + static_cast<std::ptrdiff_t>(half));
            l.assign(bins.begin() + static_cast<std::ptrdiff_t>(half), bins.end());
            if (cfg.mode == TimingMode::proposed && compensate) {
                u = inloop_cd_comp(u, f_upper, cfg.residual_cd, cfg.sc_center_freq_hz);
                l = inloop_cd_comp(l, f_lower, cfg.residual_cd, cfg.sc_center_freq_hz);
            }
        }

        const GodardResult g = godard_ted(u, l);
        const bool hold = g.correlation_mag < cfg.hold_threshold_rel * g.bin_energy;
        if (!hold)
            loop_step(res.state, g.error_symbols, cfg);
        else
            res.state.block_index += 1;  // block consumed, state held

        res.trace.raw_error_symbols.push_back(g.error_symbols);
        res.trace.accumulated_phase_symbols.push_back(
            (static_cast<double>(res.state.wrap_offset) + res.state.mu) / cfg.sps);
        res.trace.true_phase_symbols.push_back(
            true_phase ? true_phase(static_cast<std::size_t>(bp)) : 0.0);
        res.trace.locked.push_back(res.state.locked ? 1 : 0);
        res.trace.held.push_back(hold ? 1 : 0);
        if (collect_recovered)
            res.recovered.samples.insert(res.recovered.samples.end(), block.begin(), block.end());

        res.state.basepoint += static_cast<std::int64_t>(stride);
    }
    return res;
}

}  // namespace pon
