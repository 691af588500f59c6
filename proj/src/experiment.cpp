#include "pon/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pon/channel.hpp"
#include "pon/txchain.hpp"

namespace pon {

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::size_t pow2_ceil(std::size_t v) {
    std::size_t p = 1;
    while (p < v)
        p <<= 1;
    return p;
}

struct TxStream {
    ComplexWaveform wave;
    std::vector<cplx> probe_symbols;
    int sps_tx = 2;
};

// Continuous (unslotted) downstream: independent PRBS payload per subcarrier,
// shaped at the aggregate rate and summed.
TxStream build_continuous_tx(const DscmPlan& plan, std::size_t n_symbols, int probe_sc,
                             Rng rng) {
    const double fs = plan.aggregate_sample_rate_hz;
    const int sps_tx = static_cast<int>(std::llround(fs / plan.baud_per_sc_hz));
    const RrcFilter filt = rrc_design(plan.roll_off, sps_tx, 32);
    std::vector<ComplexWaveform> waves;
    waves.reserve(static_cast<std::size_t>(plan.n_subcarriers));
    TxStream tx;
    tx.sps_tx = sps_tx;
    const std::size_t n_samp = n_symbols * static_cast<std::size_t>(sps_tx);
    for (int sc = 0; sc < plan.n_subcarriers; ++sc) {
        SymbolFrame frame = map_16qam(prbs_bits(rng, n_symbols * 4));
        if (sc == probe_sc)
            tx.probe_symbols = frame.symbols;
        ComplexWaveform shaped = shape_and_upsample(frame, filt, sps_tx, plan.baud_per_sc_hz);
        shaped.samples.resize(n_samp);  // drop the filter tail, keep a pow2-friendly length
        waves.push_back(std::move(shaped));
    }
    tx.wave = dscm_mux(waves, plan);
    return tx;
}

std::string csv_mode_list(const std::vector<TimingMode>& modes) {
    std::string s;
    for (auto m : modes) {
        if (!s.empty())
            s += ",";
        s += to_string(m);
    }
    return s;
}

struct CsvSinks {
    std::ostringstream trace;
    std::ostringstream summary;
    std::ostringstream report;
};

void append_trace_rows(CsvSinks& out, std::uint64_t hash, const RunSummary& run) {
    char head[160];
    std::snprintf(head, sizeof(head), "%016llx,%.10g,%d,%.10g,%s",
                  static_cast<unsigned long long>(hash), run.baud_per_sc_hz, run.n_subcarriers,
                  run.distance_km, run.mode.c_str());
    const auto& t = run.trace;
    for (std::size_t b = 0; b < t.raw_error_symbols.size(); ++b) {
        out.trace << head << ',' << b << ',' << fmt_g(t.raw_error_symbols[b]) << ','
                  << fmt_g(t.accumulated_phase_symbols[b]) << ','
                  << fmt_g(t.true_phase_symbols[b]) << '\n';
    }
}

void append_summary_row(CsvSinks& out, std::uint64_t hash, const RunSummary& run) {
    char head[160];
    std::snprintf(head, sizeof(head), "%016llx,%.10g,%d,%.10g,%s",
                  static_cast<unsigned long long>(hash), run.baud_per_sc_hz, run.n_subcarriers,
                  run.distance_km, run.mode.c_str());
    out.summary << head << ',' << fmt_g(run.variance_symbols_sq) << ',';
    if (run.convergence_blocks)
        out.summary << *run.convergence_blocks;
    out.summary << ',';
    if (run.evm_db)
        out.summary << fmt_g(*run.evm_db);
    out.summary << ',' << run.mults_sparse << ',' << run.mults_full << '\n';
}

}  // namespace

const char* to_string(Preset p) {
    switch (p) {
        case Preset::fig2: return "fig2";
        case Preset::fig3: return "fig3";
        case Preset::slots: return "slots";
        case Preset::custom: return "custom";
    }
    return "?";
}

std::optional<Preset> preset_from_string(const std::string& s) {
    if (s == "fig2") return Preset::fig2;
    if (s == "fig3") return Preset::fig3;
    if (s == "slots") return Preset::slots;
    if (s == "custom") return Preset::custom;
    return std::nullopt;
}

std::size_t auto_k_points(std::size_t dft_size_n, double roll_off) {
    const auto half = static_cast<std::size_t>(
        std::llround(roll_off * static_cast<double>(dft_size_n) / 2.0));
    return 2 * std::max<std::size_t>(1, half);
}

std::size_t auto_dft_size(double baud_hz, double max_distance_km, const FiberSpec& fiber) {
    // band-edge pair group-delay spread in samples at 2 samples/symbol
    FiberSpec f = fiber;
    f.length_km = max_distance_km;
    const double lambda_m = f.wavelength_nm * 1e-9;
    const double spread_s = lambda_m * lambda_m * (f.dispersion_ps_nm_km * 1e-6) *
                            (max_distance_km * 1e3) * baud_hz / 299792458.0;
    const double spread_samples = spread_s * 2.0 * baud_hz;
    // keep the spread under ~N/6 so the windowed pair correlation survives;
    // the 512 floor keeps per-block self-noise inside the lock window
    const auto n = static_cast<std::size_t>(std::ceil(6.0 * spread_samples));
    return std::min<std::size_t>(8192, std::max<std::size_t>(512, pow2_ceil(n)));
}

const std::vector<StockConfig>& stock_dscm_configs() {
    static const std::vector<StockConfig> configs = [] {
        const FiberSpec fiber;  // 16 ps/nm/km, 1550 nm
        std::vector<StockConfig> v;
        for (int n_sc : {8, 4, 2, 1}) {
            const double baud = 64e9 / n_sc;
            const std::size_t n = auto_dft_size(baud, 320.0, fiber);
            const std::size_t blocks_needed = 1024;  // discard 200 + >=500 measured + margin
            v.push_back({n_sc, baud, n, auto_k_points(n, 0.1),
                         pow2_ceil(blocks_needed * n / 2)});
        }
        return v;
    }();
    return configs;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> errors;
    auto err = [&](const std::string& field, const std::string& msg) {
        errors.push_back(field + ": " + msg);
    };

    if (!cfg.preset_given)
        err("experiment.preset", "preset is required (fig2|fig3|slots|custom)");
    if (!cfg.distances_km.empty()) {
        double prev = -1.0;
        for (double d : cfg.distances_km) {
            if (d < 0.0)
                err("experiment.distances_km", "distances must be non-negative");
            if (d < prev)
                err("experiment.distances_km", "distances must be ascending");
            prev = d;
        }
    }
    for (const auto& m : cfg.mode_names)
        if (!timing_mode_from_string(m))
            err("experiment.modes", "unknown mode '" + m + "'");
    if (cfg.snr_db <= 0.0 && std::isfinite(cfg.snr_db))
        err("experiment.snr_db", "SNR must be positive (omit for noise off)");

    if (cfg.n_subcarriers < 1)
        err("plan.n_subcarriers", "must be >= 1");
    if (cfg.baud_per_sc_ghz <= 0.0)
        err("plan.baud_per_sc_ghz", "must be > 0");
    if (cfg.roll_off < 0.0 || cfg.roll_off > 1.0)
        err("plan.roll_off", "must be in [0,1]");
    if (cfg.aggregate_rate_gsa <= 0.0)
        err("plan.aggregate_rate_gsa", "must be > 0");
    if (cfg.probe_subcarrier >= cfg.n_subcarriers && cfg.preset == Preset::custom)
        err("experiment.probe_subcarrier", "index beyond plan.n_subcarriers");

    if (cfg.dispersion_ps_nm_km <= 0.0)
        err("fiber.dispersion_ps_nm_km", "must be > 0");
    if (cfg.wavelength_nm <= 0.0)
        err("fiber.wavelength_nm", "must be > 0");

    if (cfg.dft_size != 0 && (cfg.dft_size < 8 || (cfg.dft_size & (cfg.dft_size - 1)) != 0))
        err("loop.dft_size", "must be a power of two >= 8 (or 0 for auto)");
    if (cfg.k_points != 0) {
        if (cfg.k_points % 2 != 0)
            err("loop.k_points", "must be even");
        if (cfg.dft_size != 0 && cfg.k_points > cfg.dft_size / 2)
            err("loop.k_points", "must be <= dft_size/2");
    }
    if (cfg.kp <= 0.0)
        err("loop.kp", "must be > 0");
    if (cfg.ki <= 0.0)
        err("loop.ki", "must be > 0");
    if (cfg.hold_threshold_rel < 0.0 || cfg.hold_threshold_rel >= 1.0)
        err("loop.hold_threshold_rel", "must be in [0,1)");

    if (std::abs(cfg.initial_offset_symbols) >= 0.5)
        err("impairment.initial_offset_symbols", "|offset| must be below 0.5 symbol");
    if (std::abs(cfg.step_offset_symbols) >= 0.5)
        err("impairment.step_offset_symbols", "|step| must be below 0.5 symbol");
    if (cfg.step_at_fraction < 0.0 || cfg.step_at_fraction > 1.0)
        err("impairment.step_at_fraction", "must be in [0,1]");

    if (cfg.slots_own_km < 0.0 || cfg.slots_foreign_km < 0.0)
        err("slots", "distances must be >= 0");
    if (cfg.slot_blocks < 50)
        err("slots.slot_blocks", "need at least 50 blocks per slot");

    // enough blocks for a stable variance after the discard window
    if (cfg.n_symbols != 0) {
        const std::size_t n_dft = cfg.dft_size ? cfg.dft_size : 2048;  // worst stock case
        const std::size_t blocks = cfg.n_symbols * 2 / n_dft;
        if (blocks < cfg.discard_blocks + 500)
            err("experiment.n_symbols",
                "must give at least discard_blocks + 500 loop blocks (have " +
                    std::to_string(blocks) + ")");
    }
    return errors;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << to_string(cfg.preset) << ';' << cfg.seed << ';';
    for (double d : cfg.distances_km)
        os << d << ',';
    os << ';';
    for (const auto& m : cfg.mode_names)
        os << m << ',';
    os << ';' << cfg.n_symbols << ';' << cfg.snr_db << ';' << cfg.discard_blocks << ';'
       << cfg.probe_subcarrier << ';' << cfg.n_subcarriers << ';' << cfg.baud_per_sc_ghz << ';'
       << cfg.roll_off << ';' << cfg.aggregate_rate_gsa << ';' << cfg.dispersion_ps_nm_km << ';'
       << cfg.wavelength_nm << ';' << cfg.dft_size << ';' << cfg.k_points << ';' << cfg.kp << ';'
       << cfg.ki << ';' << cfg.block_stride << ';' << cfg.hold_threshold_rel << ';'
       << cfg.initial_offset_symbols << ';' << cfg.step_offset_symbols << ';'
       << cfg.step_at_fraction << ';' << cfg.drift_ppm << ';' << cfg.slots_own_km << ';'
       << cfg.slots_foreign_km << ';' << cfg.slot_blocks;
    const std::string s = os.str();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

struct ResolvedRun {
    DscmPlan plan;
    int probe_sc = 0;
    std::size_t n_symbols = 0;
    TimingLoopConfig loop;  // mode/residual filled per run
};

ResolvedRun resolve_stock(const ExperimentConfig& cfg, const StockConfig& sc) {
    ResolvedRun r;
    r.plan = make_dscm_plan(sc.n_subcarriers, sc.baud_per_sc_hz, cfg.roll_off,
                            cfg.aggregate_rate_gsa * 1e9);
    r.probe_sc = (cfg.probe_subcarrier >= 0 && cfg.probe_subcarrier < sc.n_subcarriers)
                     ? cfg.probe_subcarrier
                     : sc.n_subcarriers - 1;  // outermost, positive side
    r.n_symbols = cfg.n_symbols ? cfg.n_symbols : sc.n_symbols;
    r.loop.dft_size_n = cfg.dft_size ? cfg.dft_size : sc.dft_size_n;
    r.loop.k_points = cfg.k_points ? cfg.k_points : auto_k_points(r.loop.dft_size_n, cfg.roll_off);
    r.loop.roll_off = cfg.roll_off;
    r.loop.kp = cfg.kp;
    r.loop.ki = cfg.ki;
    r.loop.block_stride = cfg.block_stride;
    r.loop.hold_threshold_rel = cfg.hold_threshold_rel;
    r.loop.residual_cd.dispersion_ps_nm_km = cfg.dispersion_ps_nm_km;
    r.loop.residual_cd.wavelength_nm = cfg.wavelength_nm;
    r.loop.sc_center_freq_hz = r.plan.sc_center_freqs_hz[static_cast<std::size_t>(r.probe_sc)];
    return r;
}

std::vector<TimingMode> resolve_modes(const ExperimentConfig& cfg) {
    std::vector<TimingMode> modes;
    if (cfg.mode_names.empty()) {
        modes = {TimingMode::no_comp, TimingMode::proposed};
    } else {
        for (const auto& m : cfg.mode_names)
            modes.push_back(*timing_mode_from_string(m));
    }
    return modes;
}

// One (configuration, distance, mode-set) execution on a shared waveform.
void run_point(const ExperimentConfig& cfg, const ResolvedRun& rr, const TxStream& tx,
               double distance_km, const std::vector<TimingMode>& modes, Rng& noise_rng,
               bool inject_step, std::vector<RunSummary>& out) {
    FiberSpec line;
    line.dispersion_ps_nm_km = cfg.dispersion_ps_nm_km;
    line.wavelength_nm = cfg.wavelength_nm;
    line.length_km = distance_km;

    ComplexWaveform wave = (distance_km > 0.0) ? apply_cd(tx.wave, line) : tx.wave;

    TimingTruth truth;  // identically zero unless a step is injected
    truth.step_at_sample = wave.samples.size();
    if (inject_step) {
        TimingImpairment imp;
        imp.initial_offset_symbols = cfg.initial_offset_symbols;
        imp.step_offset_symbols = cfg.step_offset_symbols;
        imp.step_at_sample = static_cast<std::size_t>(
            cfg.step_at_fraction * static_cast<double>(wave.samples.size()));
        imp.drift_ppm = cfg.drift_ppm;
        auto [w, t] = inject_timing(wave, imp, tx.sps_tx);
        wave = std::move(w);
        truth = t;
    }
    if (std::isfinite(cfg.snr_db))
        wave = add_noise(wave, cfg.snr_db, noise_rng);

    const ComplexWaveform down = subcarrier_downconvert(wave, rr.plan, rr.probe_sc);
    const auto dec = static_cast<std::size_t>(
        std::llround(rr.plan.aggregate_sample_rate_hz / down.sample_rate_hz));
    auto truth_fn = [truth, dec](std::size_t j) { return truth.at(j * dec); };

    const std::size_t guard = std::max<std::size_t>(2 * rr.loop.dft_size_n, 1024);
    const bool want_evm = distance_km == 0.0 && !std::isfinite(cfg.snr_db) && !inject_step;

    for (TimingMode mode : modes) {
        TimingLoopConfig lc = rr.loop;
        lc.mode = mode;
        lc.residual_cd.length_km = distance_km;
        TimingRunResult res = run_timing_recovery(down, lc, truth_fn, guard,
                                                  down.samples.size() - guard, nullptr, want_evm);
        RunSummary s;
        s.baud_per_sc_hz = rr.plan.baud_per_sc_hz;
        s.n_subcarriers = rr.plan.n_subcarriers;
        s.distance_km = distance_km;
        s.mode = to_string(mode);
        s.trace = std::move(res.trace);
        s.variance_symbols_sq = timing_error_variance(s.trace, cfg.discard_blocks);
        s.convergence_blocks = convergence_time(s.trace, 0.02);
        const ComplexityReport cr = complexity_report(lc);
        s.mults_sparse = cr.sparse_total;
        s.mults_full = cr.full_total;
        if (want_evm && !tx.probe_symbols.empty()) {
            // symbol-rate decision samples; try both 2-sps parities
            double best = 0.0;
            bool have = false;
            const std::size_t half_taps_sym = 16;  // (span/2) symbols of tx filter delay
            const std::size_t lead = guard / 2 > half_taps_sym ? guard / 2 - half_taps_sym : 0;
            for (std::size_t parity = 0; parity < 2; ++parity) {
                std::vector<cplx> rec;
                for (std::size_t i = parity; i < res.recovered.samples.size(); i += 2)
                    rec.push_back(res.recovered.samples[i]);
                const std::size_t m = std::min<std::size_t>(rec.size(), 8192);
                if (m < 512 || lead + m + 256 > tx.probe_symbols.size())
                    continue;
                std::vector<cplx> ref(tx.probe_symbols.begin() + static_cast<std::ptrdiff_t>(lead),
                                      tx.probe_symbols.begin() +
                                          static_cast<std::ptrdiff_t>(lead + m));
                rec.resize(m);
                const double e = evm_db(rec, ref);
                if (!have || e < best) {
                    best = e;
                    have = true;
                }
            }
            if (have)
                s.evm_db = best;
        }
        out.push_back(std::move(s));
    }
}

std::vector<RunSummary> run_grid(const ExperimentConfig& cfg, bool inject_step) {
    const std::vector<TimingMode> modes = resolve_modes(cfg);
    std::vector<double> distances = cfg.distances_km;
    if (distances.empty()) {
        if (inject_step)
            distances = {320.0};
        else
            distances = {0.0, 40.0, 80.0, 120.0, 160.0, 200.0, 240.0, 280.0, 320.0};
    }

    std::vector<const StockConfig*> configs;
    StockConfig custom_cfg{};
    if (cfg.preset == Preset::custom) {
        custom_cfg.n_subcarriers = cfg.n_subcarriers;
        custom_cfg.baud_per_sc_hz = cfg.baud_per_sc_ghz * 1e9;
        FiberSpec f;
        f.dispersion_ps_nm_km = cfg.dispersion_ps_nm_km;
        f.wavelength_nm = cfg.wavelength_nm;
        const double max_d = *std::max_element(distances.begin(), distances.end());
        custom_cfg.dft_size_n = cfg.dft_size ? cfg.dft_size
                                             : auto_dft_size(custom_cfg.baud_per_sc_hz, max_d, f);
        custom_cfg.k_points = cfg.k_points ? cfg.k_points
                                           : auto_k_points(custom_cfg.dft_size_n, cfg.roll_off);
        custom_cfg.n_symbols =
            cfg.n_symbols ? cfg.n_symbols : pow2_ceil(1024 * custom_cfg.dft_size_n / 2);
        configs.push_back(&custom_cfg);
    } else {
        for (const auto& sc : stock_dscm_configs())
            configs.push_back(&sc);
    }

    Rng master(cfg.seed);
    std::vector<RunSummary> out;
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const ResolvedRun rr = resolve_stock(cfg, *configs[ci]);
        const TxStream tx = build_continuous_tx(rr.plan, rr.n_symbols, rr.probe_sc,
                                                master.fork(1000 + ci));
        for (std::size_t li = 0; li < distances.size(); ++li) {
            Rng noise_rng = master.fork(2000 + ci * 100 + li);
            run_point(cfg, rr, tx, distances[li], modes, noise_rng, inject_step, out);
        }
    }
    return out;
}

std::vector<RunSummary> run_slots(const ExperimentConfig& cfg) {
    const std::vector<TimingMode> modes = resolve_modes(cfg);
    // 64 GBd single-carrier scenario; probe ONU owns slots pre-compensated for
    // its own distance, the middle slot targets an ONU at the foreign distance
    const StockConfig& sc64 = stock_dscm_configs().back();
    const ExperimentConfig* c = &cfg;
    ResolvedRun rr = resolve_stock(*c, sc64);
    const std::size_t n_dft = rr.loop.dft_size_n;
    const auto slot_symbols =
        static_cast<std::int64_t>(cfg.slot_blocks * n_dft / 2);

    FiberSpec fiber;
    fiber.dispersion_ps_nm_km = cfg.dispersion_ps_nm_km;
    fiber.wavelength_nm = cfg.wavelength_nm;

    SlotSchedule schedule;
    schedule.slots = {{0, slot_symbols, cfg.slots_own_km},
                      {0, slot_symbols, cfg.slots_foreign_km},
                      {0, slot_symbols, cfg.slots_own_km}};

    Rng master(cfg.seed);
    Rng tx_rng = master.fork(1000);
    auto [wave, metadata] = build_slotted_stream(schedule, rr.plan, fiber, tx_rng);

    FiberSpec line = fiber;
    line.length_km = cfg.slots_own_km;
    ComplexWaveform rx = apply_cd(wave, line);
    if (std::isfinite(cfg.snr_db)) {
        Rng noise_rng = master.fork(2000);
        rx = add_noise(rx, cfg.snr_db, noise_rng);
    }
    const ComplexWaveform down = subcarrier_downconvert(rx, rr.plan, rr.probe_sc);
    const auto dec = static_cast<std::size_t>(
        std::llround(rr.plan.aggregate_sample_rate_hz / down.sample_rate_hz));

    std::vector<RunSummary> out;
    for (TimingMode mode : modes) {
        TimingLoopState state;
        TimingTrace full;
        std::optional<std::size_t> reentry_convergence;
        const std::size_t slot_guard = 64;
        for (std::size_t si = 0; si < metadata.size(); ++si) {
            TimingLoopConfig lc = rr.loop;
            lc.mode = mode;
            lc.residual_cd.length_km = cfg.slots_own_km - metadata[si].precomp_distance_km;
            const std::size_t lo = metadata[si].start_sample / dec + slot_guard;
            const std::size_t hi = metadata[si].end_sample / dec - slot_guard;
            TimingRunResult res =
                run_timing_recovery(down, lc, nullptr, lo, hi, &state, false);
            state = res.state;
            if (si + 1 == metadata.size())
                reentry_convergence = convergence_time(res.trace, 0.02);
            full.raw_error_symbols.insert(full.raw_error_symbols.end(),
                                          res.trace.raw_error_symbols.begin(),
                                          res.trace.raw_error_symbols.end());
            full.accumulated_phase_symbols.insert(full.accumulated_phase_symbols.end(),
                                                  res.trace.accumulated_phase_symbols.begin(),
                                                  res.trace.accumulated_phase_symbols.end());
            full.true_phase_symbols.insert(full.true_phase_symbols.end(),
                                           res.trace.true_phase_symbols.begin(),
                                           res.trace.true_phase_symbols.end());
            full.locked.insert(full.locked.end(), res.trace.locked.begin(),
                               res.trace.locked.end());
            full.held.insert(full.held.end(), res.trace.held.begin(), res.trace.held.end());
        }
        RunSummary s;
        s.baud_per_sc_hz = rr.plan.baud_per_sc_hz;
        s.n_subcarriers = rr.plan.n_subcarriers;
        s.distance_km = cfg.slots_own_km - cfg.slots_foreign_km;  // the residual mismatch
        s.mode = to_string(mode);
        s.trace = std::move(full);
        s.variance_symbols_sq =
            timing_error_variance(s.trace, s.trace.raw_error_symbols.size() / 2);
        s.convergence_blocks = reentry_convergence;
        const ComplexityReport cr = complexity_report(rr.loop);
        s.mults_sparse = cr.sparse_total;
        s.mults_full = cr.full_total;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg) {
    const auto errors = validate_config(cfg);
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors)
            msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }

    std::vector<RunSummary> runs;
    switch (cfg.preset) {
        case Preset::fig2: runs = run_grid(cfg, false); break;
        case Preset::fig3: {
            ExperimentConfig c = cfg;
            if (c.step_offset_symbols == 0.0)
                c.step_offset_symbols = 0.25;  // the preset's default step
            runs = run_grid(c, true);
            break;
        }
        case Preset::slots: runs = run_slots(cfg); break;
        case Preset::custom:
            runs = run_grid(cfg, cfg.step_offset_symbols != 0.0 ||
                                     cfg.initial_offset_symbols != 0.0 || cfg.drift_ppm != 0.0);
            break;
    }

    const std::uint64_t hash = config_hash(cfg);
    CsvSinks sinks;
    sinks.trace << "config_hash,baud_per_sc,n_sc,distance_km,mode,block,raw_error_symbols,"
                   "est_phase_symbols,true_phase_symbols\n";
    sinks.summary << "config_hash,baud_per_sc,n_sc,distance_km,mode,variance_symbols_sq,"
                     "convergence_blocks,evm_db,mults_sparse,mults_full\n";
    for (const auto& run : runs) {
        append_trace_rows(sinks, hash, run);
        append_summary_row(sinks, hash, run);
    }

    sinks.report << "pon-timing-sim report\n";
    sinks.report << "preset " << to_string(cfg.preset) << ", seed " << cfg.seed << ", modes "
                 << csv_mode_list(resolve_modes(cfg)) << "\n";
    char hashbuf[24];
    std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                  static_cast<unsigned long long>(hash));
    sinks.report << "config hash " << hashbuf << "\n\n";
    {
        TimingLoopConfig defaults;
        sinks.report << "reference complexity (stock defaults)\n"
                     << format_complexity(complexity_report(defaults)) << "\n";
    }
    if (cfg.preset != Preset::custom) {
        for (const auto& sc : stock_dscm_configs()) {
            TimingLoopConfig lc;
            lc.dft_size_n = cfg.dft_size ? cfg.dft_size : sc.dft_size_n;
            lc.k_points = cfg.k_points ? cfg.k_points : sc.k_points;
            sinks.report << sc.baud_per_sc_hz / 1e9 << " GBd x " << sc.n_subcarriers << " SC\n"
                         << format_complexity(complexity_report(lc)) << "\n";
        }
    }

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    for (const auto& [name, sink] :
         {std::pair<const char*, const std::ostringstream*>{"trace.csv", &sinks.trace},
          {"summary.csv", &sinks.summary},
          {"report.txt", &sinks.report}}) {
        std::ofstream f(fs::path(cfg.out_dir) / name, std::ios::binary);
        if (!f)
            throw std::runtime_error(std::string("cannot write ") + name);
        f << sink->str();
    }
    return runs;
}

}  // namespace pon
