#include "pon/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pon/fft.hpp"
#include "pon/sigcore.hpp"

namespace pon {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;  // m/s

void validate_fiber(const FiberSpec& fiber) {
    if (fiber.dispersion_ps_nm_km <= 0.0 || fiber.wavelength_nm <= 0.0)
        throw std::invalid_argument("FiberSpec: dispersion and wavelength must be positive");
    if (fiber.length_km < 0.0)
        throw std::invalid_argument("FiberSpec: length must be >= 0");
}

ComplexWaveform cd_allpass(const ComplexWaveform& x, const FiberSpec& fiber, double f_center_hz,
                           double sign) {
    validate_fiber(fiber);
    if (x.samples.size() < 2)
        throw std::invalid_argument("apply_cd: waveform too short");
    std::vector<cplx> spec(x.samples);
    fft_forward(spec);
    const std::size_t n = spec.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double f = f_center_hz + bin_freq_hz(k, n, x.sample_rate_hz);
        const double phi = sign * cd_phase(f, fiber);
        spec[k] *= cplx(std::cos(phi), std::sin(phi));
    }
    fft_inverse(spec);
    return ComplexWaveform{std::move(spec), x.sample_rate_hz};
}

}  // namespace

double cd_phase(double f_hz, const FiberSpec& fiber) {
    // D: ps/nm/km = 1e-6 s/m^2
    const double d_si = fiber.dispersion_ps_nm_km * 1e-6;
    const double lambda_m = fiber.wavelength_nm * 1e-9;
    const double length_m = fiber.length_km * 1e3;
    return kPi * lambda_m * lambda_m * d_si * length_m * f_hz * f_hz / kSpeedOfLight;
}

ComplexWaveform apply_cd(const ComplexWaveform& x, const FiberSpec& fiber, double f_center_hz) {
    return cd_allpass(x, fiber, f_center_hz, -1.0);
}

ComplexWaveform compensate_cd(const ComplexWaveform& x, const FiberSpec& fiber,
                              double f_center_hz) {
    return cd_allpass(x, fiber, f_center_hz, +1.0);
}

std::pair<ComplexWaveform, TimingTruth> inject_timing(const ComplexWaveform& x,
                                                      const TimingImpairment& imp, int sps) {
    if (sps < 1)
        throw std::invalid_argument("inject_timing: sps must be >= 1");
    if (std::abs(imp.initial_offset_symbols) >= 0.5 || std::abs(imp.step_offset_symbols) >= 0.5)
        throw std::invalid_argument("inject_timing: offsets must be below 0.5 symbol");
    const bool has_step = imp.step_offset_symbols != 0.0;
    if (has_step && imp.step_at_sample >= x.samples.size())
        throw std::invalid_argument("inject_timing: step index out of range");

    TimingTruth truth;
    truth.initial_symbols = imp.initial_offset_symbols;
    truth.step_symbols = has_step ? imp.step_offset_symbols : 0.0;
    truth.step_at_sample = has_step ? imp.step_at_sample : x.samples.size();
    truth.drift_symbols_per_sample = imp.drift_ppm * 1e-6 / sps;

    ComplexWaveform y{std::vector<cplx>(x.samples.size()), x.sample_rate_hz};

    if (imp.drift_ppm == 0.0) {
        const double d0 = imp.initial_offset_symbols * sps;
        if (!has_step) {
            y = (d0 == 0.0) ? x : ideal_fractional_delay(x, d0);
        } else {
            const double d1 = (imp.initial_offset_symbols + imp.step_offset_symbols) * sps;
            ComplexWaveform seg{{x.samples.begin(), x.samples.begin() + imp.step_at_sample},
                                x.sample_rate_hz};
            ComplexWaveform seg2{{x.samples.begin() + imp.step_at_sample, x.samples.end()},
                                 x.sample_rate_hz};
            if (d0 != 0.0)
                seg = ideal_fractional_delay(seg, d0);
            if (d1 != 0.0)
                seg2 = ideal_fractional_delay(seg2, d1);
            std::copy(seg.samples.begin(), seg.samples.end(), y.samples.begin());
            std::copy(seg2.samples.begin(), seg2.samples.end(),
                      y.samples.begin() + imp.step_at_sample);
        }
        return {std::move(y), truth};
    }

    // Drift: resample at the per-sample delay with a cubic Lagrange kernel.
    const auto n = static_cast<std::ptrdiff_t>(x.samples.size());
    auto at = [&](std::ptrdiff_t i) {
        // clamp at the edges; experiments discard guard samples anyway
        if (i < 0)
            i = 0;
        if (i >= n)
            i = n - 1;
        return x.samples[static_cast<std::size_t>(i)];
    };
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double delay = truth.at(static_cast<std::size_t>(i)) * sps;
        const double pos = static_cast<double>(i) - delay;
        const auto base = static_cast<std::ptrdiff_t>(std::floor(pos));
        const double mu = pos - static_cast<double>(base);
        const cplx xm1 = at(base - 1), x0 = at(base), x1 = at(base + 1), x2 = at(base + 2);
        const cplx c0 = x0;
        const cplx c1 = x1 - xm1 / 3.0 - x0 / 2.0 - x2 / 6.0;
        const cplx c2 = (xm1 + x1) / 2.0 - x0;
        const cplx c3 = (x2 - xm1) / 6.0 + (x0 - x1) / 2.0;
        y.samples[static_cast<std::size_t>(i)] = ((c3 * mu + c2) * mu + c1) * mu + c0;
    }
    return {std::move(y), truth};
}

ComplexWaveform add_noise(const ComplexWaveform& x, double snr_db, Rng& rng) {
    return awgn(x, snr_db, rng);
}

}  // namespace pon
