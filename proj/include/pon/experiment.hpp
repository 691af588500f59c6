// Experiment runner: resolves a preset or custom configuration into a set of
// (configuration, distance, mode) runs, executes them deterministically, and
// writes trace.csv / summary.csv / report.txt for external plotting.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pon/metrics.hpp"
#include "pon/rxdsp.hpp"

namespace pon {

enum class Preset { fig2, fig3, slots, custom };

const char* to_string(Preset p);
std::optional<Preset> preset_from_string(const std::string& s);

struct ExperimentConfig {
    Preset preset = Preset::custom;
    bool preset_given = false;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    // run
    std::vector<double> distances_km;  // empty -> preset default
    std::vector<std::string> mode_names;  // empty -> {no_comp, proposed}
    std::size_t n_symbols = 0;         // per subcarrier; 0 -> per-configuration default
    double snr_db = std::numeric_limits<double>::infinity();  // +inf = noise off
    std::size_t discard_blocks = 200;
    int probe_subcarrier = -1;         // -1 -> outermost (largest center frequency)

    // plan (custom preset; stock presets use the four standard configurations)
    int n_subcarriers = 1;
    double baud_per_sc_ghz = 64.0;
    double roll_off = 0.1;
    double aggregate_rate_gsa = 128.0;

    // fiber
    double dispersion_ps_nm_km = 16.0;
    double wavelength_nm = 1550.0;

    // loop (0 = auto)
    std::size_t dft_size = 0;
    std::size_t k_points = 0;
    double kp = 0.05;
    double ki = 1e-3;
    std::size_t block_stride = 0;
    double hold_threshold_rel = 0.02;

    // impairment (applied by fig3 and custom presets)
    double initial_offset_symbols = 0.0;
    double step_offset_symbols = 0.0;
    double step_at_fraction = 0.5;
    double drift_ppm = 0.0;

    // slots preset scenario
    double slots_own_km = 280.0;
    double slots_foreign_km = 40.0;
    std::size_t slot_blocks = 300;
};

// All semantic violations, one human-readable message per field. Empty = valid.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// One of the four standard 64 GBd-capacity DSCM splits, with the loop sizing
// the presets use for it. The DFT span must cover the residual-CD group-delay
// spread between the +-half-baud band edges, which grows as baud^2, so the
// higher-baud configurations run larger transforms.
struct StockConfig {
    int n_subcarriers;
    double baud_per_sc_hz;
    std::size_t dft_size_n;
    std::size_t k_points;
    std::size_t n_symbols;
};

const std::vector<StockConfig>& stock_dscm_configs();

// K = 2*round(roll_off * N / 2): both band-edge excess bands, one bin set each.
std::size_t auto_k_points(std::size_t dft_size_n, double roll_off);

// Smallest power of two covering the band-edge pair group-delay spread with
// the margin the presets use (never below 128).
std::size_t auto_dft_size(double baud_hz, double max_distance_km, const FiberSpec& fiber);

struct RunSummary {
    double baud_per_sc_hz = 0.0;
    int n_subcarriers = 0;
    double distance_km = 0.0;
    std::string mode;
    double variance_symbols_sq = 0.0;
    std::optional<std::size_t> convergence_blocks;
    std::optional<double> evm_db;
    std::int64_t mults_sparse = 0;
    std::int64_t mults_full = 0;
    TimingTrace trace;
};

// Executes every run of the resolved configuration and writes the CSV/report
// files into cfg.out_dir. Throws std::invalid_argument on config errors and
// std::runtime_error on runtime faults.
std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg);

// FNV-1a 64-bit over the canonical serialized configuration.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace pon
