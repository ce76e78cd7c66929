#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stfspread/codebook.hpp"
#include "stfspread/receiver.hpp"
#include "stfspread/scenario.hpp"
#include "stfspread/spreading.hpp"

namespace stfs {

struct SweepSpec {
    std::string key;             // swept config key; empty = single point
    std::vector<double> values;  // at least one value when key is set
};

// Full experiment description. Every knob is a plain config key; parsing
// rejects unknown keys and validation names the violated constraint.
struct SystemConfig {
    int m = 8;   // active devices
    int n = 64;  // gateway antennas
    int l = 8;   // blocks
    int t = 8;   // dispersion length
    int q = 8;   // codebook size

    std::vector<Mode> modes = {Mode::st};
    std::vector<Scenario> scenarios = {Scenario::indoor_inh};
    DecoderKind decoder = DecoderKind::ml;

    int psk_order = 4;
    int fsk_order = 4;
    bool qam = false;  // use square QAM instead of PSK for the coherent stream

    double tx_power_dbm = 0.0;
    double noise_figure_db = 7.0;
    double carrier_ghz = 2.0;
    double r_min_m = 100.0;
    double r_max_m = 1000.0;
    double shadow_mean_db = 4.0;
    double shadow_var_db2 = 2.0;

    int n_taps = 4;
    std::string pdp = "exp";  // exp | uniform
    double pdp_decay_db = 3.0;
    double fd_norm = 0.01;
    int sos_oscillators = 16;

    double block_duration_us = 10.0;
    int guard_samples = -1;  // -1: n_taps - 1
    double subband_spacing_hz = 10.0;
    int stf_subbands = 0;  // 0 = auto

    std::string codebook_construction = "random_gaussian";
    std::string codebook_criterion = "max_min_distance";
    int codebook_budget = 1;
    std::string codebook_file;  // optional: load instead of generating

    int pilot_len = 0;  // 0 = auto
    bool perfect_csi = false;
    std::string assignment = "random";  // random | fixed
    double outage_threshold_db = 0.0;
    bool allow_overload = false;  // permit M > L / T / Q (block sharing)

    long n_trials = 1000;
    std::uint64_t master_seed = 1;
    SweepSpec sweep;

    // thermal noise at the wideband symbol rate, dBm
    double noise_power_dbm() const;
    double symbol_rate_hz() const;

    void validate() const;  // throws ConfigError naming the violated constraint

    static SystemConfig from_file(const std::string& path);
    static SystemConfig from_text(const std::string& text);
    void apply_line(const std::string& key, const std::string& value);
    void apply_text(const std::string& text);  // overlay onto current values
    void apply_file(const std::string& path);
    std::string to_text() const;
};

// Named experiment presets (fig3..fig7).
SystemConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace stfs
