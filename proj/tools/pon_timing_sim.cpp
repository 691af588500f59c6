// pon-timing-sim: batch experiment runner. Parses a sectioned key/value
// config file plus a few override flags, executes the selected preset and
// writes trace.csv, summary.csv and report.txt into the output directory.
// Exit codes: 0 ok, 1 configuration error, 2 runtime fault.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include "pon/experiment.hpp"

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

// "[a, b, c]" or "a, b, c" with optionally quoted elements -> "a,b,c"
std::string normalize_value(std::string v) {
    if (v.size() >= 2 && v.front() == '[' && v.back() == ']')
        v = trim(v.substr(1, v.size() - 2));
    if (v.find(',') == std::string::npos)
        return unquote(v);
    std::string out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto next = v.find(',', pos);
        const std::string elem =
            unquote(trim(v.substr(pos, next == std::string::npos ? next : next - pos)));
        if (!out.empty())
            out += ',';
        out += elem;
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return out;
}

// [section] key = value  ->  "--section.key=value" tokens for the parser.
// Lists are comma separated; values may be quoted; # and ; start comments.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open config file: " + path);
    std::vector<std::string> tokens;
    std::string line, section;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        if (cut != std::string::npos)
            line = line.substr(0, cut);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = normalize_value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        const std::string name = section.empty() ? key : section + "." + key;
        tokens.push_back("--" + name + "=" + value);
    }
    return tokens;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Downstream coherent PON timing-recovery simulator"};

    pon::ExperimentConfig cfg;
    std::string preset_name;
    std::string config_path;

    app.add_option("--config", config_path, "configuration file (key/value with [sections])");
    app.add_option("--preset", preset_name, "fig2|fig3|slots|custom");
    app.add_option("--seed", cfg.seed, "master seed for all PRBS/noise draws");
    app.add_option("--out", cfg.out_dir, "output directory");

    app.add_option("--experiment.distances_km", cfg.distances_km,
                   "transmission distance grid in km, comma separated, ascending")
        ->delimiter(',');
    app.add_option("--experiment.modes", cfg.mode_names,
                   "timing modes to run: no_comp, proposed, full_comp")
        ->delimiter(',');
    app.add_option("--experiment.n_symbols", cfg.n_symbols,
                   "symbols per subcarrier per run (0 = per-configuration default)");
    app.add_option("--experiment.snr_db", cfg.snr_db, "AWGN SNR in dB (omit for noise off)");
    app.add_option("--experiment.discard_blocks", cfg.discard_blocks,
                   "blocks discarded before variance measurement");
    app.add_option("--experiment.probe_subcarrier", cfg.probe_subcarrier,
                   "receiver subcarrier index (-1 = outermost)");

    app.add_option("--plan.n_subcarriers", cfg.n_subcarriers, "custom preset: subcarrier count");
    app.add_option("--plan.baud_per_sc_ghz", cfg.baud_per_sc_ghz,
                   "custom preset: per-subcarrier baud in GBd");
    app.add_option("--plan.roll_off", cfg.roll_off, "RRC roll-off");
    app.add_option("--plan.aggregate_rate_gsa", cfg.aggregate_rate_gsa,
                   "aggregate simulation rate in GSa/s");

    app.add_option("--fiber.dispersion_ps_nm_km", cfg.dispersion_ps_nm_km, "fiber D");
    app.add_option("--fiber.wavelength_nm", cfg.wavelength_nm, "carrier wavelength");

    app.add_option("--loop.dft_size", cfg.dft_size, "timing DFT size N (0 = auto)");
    app.add_option("--loop.k_points", cfg.k_points, "band-edge bin count K (0 = auto)");
    app.add_option("--loop.kp", cfg.kp, "proportional gain");
    app.add_option("--loop.ki", cfg.ki, "integral gain");
    app.add_option("--loop.block_stride", cfg.block_stride, "block stride (0 = N)");
    app.add_option("--loop.hold_threshold_rel", cfg.hold_threshold_rel,
                   "relative |S| threshold below which a block is held");

    app.add_option("--impairment.initial_offset_symbols", cfg.initial_offset_symbols,
                   "initial sampling phase offset");
    app.add_option("--impairment.step_offset_symbols", cfg.step_offset_symbols,
                   "sampling phase step (fig3 default 0.25)");
    app.add_option("--impairment.step_at_fraction", cfg.step_at_fraction,
                   "step position as a fraction of the stream");
    app.add_option("--impairment.drift_ppm", cfg.drift_ppm, "clock drift in ppm");

    app.add_option("--slots.own_km", cfg.slots_own_km, "probe ONU distance");
    app.add_option("--slots.foreign_km", cfg.slots_foreign_km, "foreign ONU distance");
    app.add_option("--slots.slot_blocks", cfg.slot_blocks, "loop blocks per slot");

    // command line overrides the config file (config tokens are parsed first)
    for (const auto& opt : app.get_options())
        const_cast<CLI::Option*>(opt)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // peek at --config before the real parse so its tokens go in front
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size())
                config_path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0)
                config_path = args[i].substr(9);
        }
        if (!config_path.empty()) {
            auto tokens = config_tokens(config_path);
            args.insert(args.begin(), tokens.begin(), tokens.end());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    try {
        // CLI11 consumes tokens back to front
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (!preset_name.empty()) {
        const auto p = pon::preset_from_string(preset_name);
        if (!p) {
            std::fprintf(stderr, "error: unknown preset '%s'\n", preset_name.c_str());
            return 1;
        }
        cfg.preset = *p;
        cfg.preset_given = true;
    }

    try {
        const auto runs = pon::run_experiment(cfg);
        std::printf("wrote %zu runs to %s (trace.csv, summary.csv, report.txt)\n", runs.size(),
                    cfg.out_dir.c_str());
        return 0;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime fault: %s\n", e.what());
        return 2;
    }
}
