#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "pon/fft.hpp"
#include "pon/txchain.hpp"

using namespace pon;

TEST_SUITE_BEGIN("txchain");

TEST_CASE("prbs bits: determinism, balance, edge cases") {
    Rng a(21), b(21);
    const auto x = prbs_bits(a, 4096);
    const auto y = prbs_bits(b, 4096);
    CHECK(x == y);

    Rng r(22);
    const auto big = prbs_bits(r, 1 << 20);
    double ones = 0.0;
    for (auto v : big)
        ones += v;
    CHECK(std::abs(ones / static_cast<double>(big.size()) - 0.5) < 0.01);

    Rng e(23);
    CHECK(prbs_bits(e, 0).empty());
    CHECK_THROWS_AS(prbs_bits(e, 6), std::invalid_argument);
}

TEST_CASE("16qam mapping table and alphabet") {
    const double s = 1.0 / std::sqrt(10.0);
    auto f = map_16qam({0, 0, 0, 0});
    CHECK(std::abs(f.symbols[0] - cplx(-3.0 * s, -3.0 * s)) < 1e-15);

    // all 16 patterns: distinct points, average power exactly 1
    std::vector<std::uint8_t> bits;
    for (int v = 0; v < 16; ++v)
        for (int b = 3; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
    const auto frame = map_16qam(bits);
    std::set<std::pair<double, double>> pts;
    double power = 0.0;
    for (const auto& p : frame.symbols) {
        pts.insert({p.real(), p.imag()});
        power += std::norm(p);
    }
    CHECK(pts.size() == 16);
    CHECK(std::abs(power / 16.0 - 1.0) < 1e-12);

    CHECK_THROWS_AS(map_16qam({0, 1, 0}), std::invalid_argument);
}

TEST_CASE("16qam Gray property: grid neighbors differ in one bit") {
    // exhaustive over the 16-point grid
    std::vector<std::uint8_t> bits;
    for (int v = 0; v < 16; ++v)
        for (int b = 3; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
    const auto frame = map_16qam(bits);
    const double d_min = 2.0 / std::sqrt(10.0);
    for (int i = 0; i < 16; ++i) {
        for (int j = i + 1; j < 16; ++j) {
            const double d = std::abs(frame.symbols[i] - frame.symbols[j]);
            if (std::abs(d - d_min) < 1e-9) {
                const int ham = ((i ^ j) & 1) + (((i ^ j) >> 1) & 1) + (((i ^ j) >> 2) & 1) +
                                (((i ^ j) >> 3) & 1);
                CHECK(ham == 1);
            }
        }
    }
}

TEST_CASE("shape_and_upsample: impulse response and length") {
    const RrcFilter filt = rrc_design(0.1, 4, 8);
    SymbolFrame frame;
    frame.symbols = {cplx(1.0, 0.0)};
    const auto w = shape_and_upsample(frame, filt, 4, 1e9);
    REQUIRE(w.samples.size() == 1 * 4 + filt.taps.size() - 1);
    for (std::size_t i = 0; i < filt.taps.size(); ++i)
        CHECK(std::abs(w.samples[i] - cplx(filt.taps[i], 0.0)) < 1e-15);
    CHECK(w.sample_rate_hz == doctest::Approx(4e9));

    CHECK_THROWS_AS(shape_and_upsample(frame, filt, 2, 1e9), std::invalid_argument);
}

TEST_CASE("shape_and_upsample matches dense zero-stuffed convolution") {
    Rng rng(24);
    SymbolFrame frame = map_16qam(prbs_bits(rng, 64 * 4));
    const RrcFilter filt = rrc_design(0.1, 8, 16);
    const auto fast = shape_and_upsample(frame, filt, 8, 1e9);
    // dense oracle
    std::vector<cplx> up(frame.symbols.size() * 8, cplx(0, 0));
    for (std::size_t s = 0; s < frame.symbols.size(); ++s)
        up[8 * s] = frame.symbols[s];
    std::vector<cplx> dense(up.size() + filt.taps.size() - 1, cplx(0, 0));
    for (std::size_t i = 0; i < up.size(); ++i)
        for (std::size_t k = 0; k < filt.taps.size(); ++k)
            dense[i + k] += up[i] * filt.taps[k];
    REQUIRE(fast.samples.size() == dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i)
        CHECK(std::abs(fast.samples[i] - dense[i]) < 1e-12);
}

TEST_CASE("matched-filter loopback EVM <= -35 dB") {
    Rng rng(25);
    const std::size_t n_sym = 4096;
    SymbolFrame frame = map_16qam(prbs_bits(rng, n_sym * 4));
    const RrcFilter filt = rrc_design(0.1, 2, 32);
    const auto tx = shape_and_upsample(frame, filt, 2, 1e9);
    // receive matched filter, full convolution
    std::vector<cplx> mf(tx.samples.size() + filt.taps.size() - 1, cplx(0, 0));
    for (std::size_t i = 0; i < tx.samples.size(); ++i)
        for (std::size_t k = 0; k < filt.taps.size(); ++k)
            mf[i + k] += tx.samples[i] * filt.taps[k];
    const std::size_t delay = filt.taps.size() - 1;  // both filters centered
    double err = 0.0, ref = 0.0;
    for (std::size_t s = 100; s + 100 < n_sym; ++s) {
        const cplx got = mf[delay + 2 * s];
        err += std::norm(got - frame.symbols[s]);
        ref += std::norm(frame.symbols[s]);
    }
    CHECK(10.0 * std::log10(err / ref) <= -35.0);
}

TEST_CASE("dscm plan geometry for the four stock splits") {
    for (int n_sc : {8, 4, 2, 1}) {
        const double baud = 64e9 / n_sc;
        const DscmPlan plan = make_dscm_plan(n_sc, baud);
        CHECK(plan.n_subcarriers * plan.baud_per_sc_hz == doctest::Approx(64e9));
        const double spacing = baud * 1.1;
        for (int i = 0; i < n_sc; ++i) {
            CHECK(plan.sc_center_freqs_hz[i] ==
                  doctest::Approx((i - (n_sc - 1) / 2.0) * spacing));
            // symmetric about 0
            CHECK(plan.sc_center_freqs_hz[i] ==
                  doctest::Approx(-plan.sc_center_freqs_hz[n_sc - 1 - i]));
        }
        CHECK(plan.aggregate_sample_rate_hz >= n_sc * spacing);
    }
    CHECK_THROWS_AS(make_dscm_plan(16, 16e9), std::invalid_argument);  // would alias
}

TEST_CASE("dscm_mux: degenerate single subcarrier and power additivity") {
    Rng rng(26);
    const DscmPlan plan1 = make_dscm_plan(1, 64e9);
    SymbolFrame f = map_16qam(prbs_bits(rng, 1024 * 4));
    const RrcFilter filt = rrc_design(0.1, 2, 32);
    auto w = shape_and_upsample(f, filt, 2, 64e9);
    const auto agg = dscm_mux({w}, plan1);
    REQUIRE(agg.samples.size() == w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        CHECK(std::abs(agg.samples[i] - w.samples[i]) < 1e-12);

    // 4 x 16G: aggregate power == sum of per-SC powers within 1%
    const DscmPlan plan4 = make_dscm_plan(4, 16e9);
    const RrcFilter filt8 = rrc_design(0.1, 8, 32);
    std::vector<ComplexWaveform> waves;
    double p_sum = 0.0;
    for (int sc = 0; sc < 4; ++sc) {
        SymbolFrame sf = map_16qam(prbs_bits(rng, 2048 * 4));
        auto sw = shape_and_upsample(sf, filt8, 8, 16e9);
        sw.samples.resize(2048 * 8);
        p_sum += mean_power(sw);
        waves.push_back(std::move(sw));
    }
    const auto agg4 = dscm_mux(waves, plan4);
    CHECK(std::abs(mean_power(agg4) - p_sum) / p_sum < 0.01);
}

TEST_CASE("dscm_mux: 8-subcarrier spectrum has lobes at the plan centers") {
    Rng rng(27);
    const DscmPlan plan = make_dscm_plan(8, 8e9);
    const RrcFilter filt = rrc_design(0.1, 16, 32);
    std::vector<ComplexWaveform> waves;
    for (int sc = 0; sc < 8; ++sc) {
        SymbolFrame sf = map_16qam(prbs_bits(rng, 1024 * 4));
        auto sw = shape_and_upsample(sf, filt, 16, 8e9);
        sw.samples.resize(1024 * 16);
        waves.push_back(std::move(sw));
    }
    const auto agg = dscm_mux(waves, plan);
    const auto spec = dft_full(agg.samples);
    const std::size_t n = spec.size();
    const double fs = plan.aggregate_sample_rate_hz;
    // periodogram peak within each subcarrier's band sits near its center,
    // and >= 99% of total energy lies within the planned occupancy
    double total = 0.0;
    for (const auto& v : spec)
        total += std::norm(v);
    const double half_band = 8 * 8e9 * 1.1 / 2.0;
    double in_band = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = bin_freq_hz(k, n, fs);
        if (std::abs(f) <= half_band)
            in_band += std::norm(spec[k]);
    }
    CHECK(in_band / total >= 0.99);
    // bands are contiguous at spacing (1+beta)*baud: each subcarrier slice
    // carries very nearly an equal share of the energy
    for (int sc = 0; sc < 8; ++sc) {
        const double c = plan.sc_center_freqs_hz[sc];
        double e_sc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double f = bin_freq_hz(k, n, fs);
            if (std::abs(f - c) <= 4.4e9)
                e_sc += std::norm(spec[k]);
        }
        CHECK(e_sc / total > 0.10);
        CHECK(e_sc / total < 0.15);
    }
}

TEST_CASE("cd_precompensate: identity, inverse pair, phase additivity") {
    Rng rng(28);
    std::vector<cplx> s(1 << 13);
    for (auto& v : s)
        v = cplx(rng.next_gaussian(), rng.next_gaussian());
    const ComplexWaveform x{std::move(s), 128e9};
    FiberSpec fiber;

    const auto same = cd_precompensate(x, fiber, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(same.samples[i] == x.samples[i]);
    CHECK_THROWS_AS(cd_precompensate(x, fiber, -1.0), std::invalid_argument);

    const double scale = std::sqrt(mean_power(x));
    for (double L : {40.0, 80.0, 160.0, 320.0}) {
        FiberSpec line = fiber;
        line.length_km = L;
        const auto rt = apply_cd(cd_precompensate(x, fiber, L), line);
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            worst = std::max(worst, std::abs(rt.samples[i] - x.samples[i]) / scale);
        CHECK(worst < 1e-8);
    }

    // pre-compensate 320, propagate 400 == plain 80 km propagation
    FiberSpec l400 = fiber, l80 = fiber;
    l400.length_km = 400.0;
    l80.length_km = 80.0;
    const auto a = apply_cd(cd_precompensate(x, fiber, 320.0), l400);
    const auto b = apply_cd(x, l80);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(a.samples[i] - b.samples[i]) / scale < 1e-8);
}

TEST_CASE("build_slotted_stream: boundaries, degenerate schedule, errors") {
    const DscmPlan plan = make_dscm_plan(1, 64e9);
    FiberSpec fiber;
    SlotSchedule sched;
    sched.slots = {{0, 4096, 100.0}, {0, 2048, 40.0}};
    Rng rng(29);
    auto [wave, meta] = build_slotted_stream(sched, plan, fiber, rng);
    REQUIRE(meta.size() == 2);
    CHECK(meta[0].start_sample == 0);
    CHECK(meta[0].end_sample == 4096 * 2);
    CHECK(meta[1].start_sample == meta[0].end_sample);
    CHECK(meta[1].end_sample == wave.samples.size());
    CHECK(meta[0].precomp_distance_km == 100.0);
    CHECK(meta[1].precomp_distance_km == 40.0);

    // degenerate single slot equals the pre-compensated unslotted stream
    SlotSchedule one;
    one.slots = {{0, 4096, 160.0}};
    Rng r1(30), r2(30);
    auto [w1, m1] = build_slotted_stream(one, plan, fiber, r1);
    SymbolFrame f = map_16qam(prbs_bits(r2, 4096 * 4));
    const RrcFilter filt = rrc_design(plan.roll_off, 2, 32);
    auto shaped = shape_and_upsample(f, filt, 2, 64e9);
    const std::size_t half = (filt.taps.size() - 1) / 2;
    std::vector<cplx> trimmed(shaped.samples.begin() + half,
                              shaped.samples.begin() + half + 4096 * 2);
    const auto want = cd_precompensate(ComplexWaveform{std::move(trimmed), 128e9}, fiber, 160.0);
    REQUIRE(w1.samples.size() == want.samples.size());
    for (std::size_t i = 0; i < want.samples.size(); ++i)
        CHECK(std::abs(w1.samples[i] - want.samples[i]) < 1e-12);

    SlotSchedule empty;
    CHECK_THROWS_AS(build_slotted_stream(empty, plan, fiber, rng), std::invalid_argument);
    SlotSchedule bad;
    bad.slots = {{3, 128, 0.0}};
    CHECK_THROWS_AS(build_slotted_stream(bad, plan, fiber, rng), std::invalid_argument);
}

TEST_SUITE_END();
