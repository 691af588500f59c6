// Fiber and clock impairments: chromatic-dispersion all-pass, sampling-phase
// error injection, optional AWGN. Sign convention, fixed project-wide:
// propagation multiplies the spectrum by exp(-j phi), compensation by
// exp(+j phi), phi(f) = pi lambda^2 D L f^2 / c.

#pragma once

#include <functional>

#include "pon/rng.hpp"
#include "pon/signal.hpp"

namespace pon {

struct FiberSpec {
    double dispersion_ps_nm_km = 16.0;
    double wavelength_nm = 1550.0;
    double length_km = 0.0;
};

// Quadratic dispersion phase in radians at absolute frequency offset f_hz.
double cd_phase(double f_hz, const FiberSpec& fiber);

// All-pass CD over the full waveform spectrum. f_center_hz offsets the
// frequency argument, so a subcarrier processed at its own baseband still
// sees the phase it occupies in the aggregate band.
ComplexWaveform apply_cd(const ComplexWaveform& x, const FiberSpec& fiber,
                         double f_center_hz = 0.0);

// Inverse all-pass (exp(+j phi)); exact inverse of apply_cd for equal length.
ComplexWaveform compensate_cd(const ComplexWaveform& x, const FiberSpec& fiber,
                              double f_center_hz = 0.0);

struct TimingImpairment {
    double initial_offset_symbols = 0.0;
    double step_offset_symbols = 0.0;
    std::size_t step_at_sample = 0;
    double drift_ppm = 0.0;
};

// Exact ground-truth sampling phase, evaluable at any sample index.
struct TimingTruth {
    double initial_symbols = 0.0;
    double step_symbols = 0.0;
    std::size_t step_at_sample = 0;
    double drift_symbols_per_sample = 0.0;

    double at(std::size_t sample) const {
        double v = initial_symbols + drift_symbols_per_sample * static_cast<double>(sample);
        if (sample >= step_at_sample)
            v += step_symbols;
        return v;
    }
};

// Delays the waveform by the impairment profile (offsets are in symbols,
// converted to samples via sps). Step segments use the exact frequency-domain
// fractional delay; nonzero drift resamples with cubic interpolation.
std::pair<ComplexWaveform, TimingTruth> inject_timing(const ComplexWaveform& x,
                                                      const TimingImpairment& imp, int sps);

// Delegates to sigcore::awgn. snr_db = +inf disables noise.
ComplexWaveform add_noise(const ComplexWaveform& x, double snr_db, Rng& rng);

}  // namespace pon
