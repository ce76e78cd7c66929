#include "stfspread/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stfs {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long r = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': '" + v + "'");
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean for '" + key + "': '" + v + "'");
}

Scenario scenario_from_name(const std::string& s) {
    if (s == "indoor" || s == "indoor_inh") return Scenario::indoor_inh;
    if (s == "outdoor" || s == "outdoor_umi") return Scenario::outdoor_umi;
    throw ConfigError("config: unknown scenario '" + s + "'");
}

const char* scenario_name(Scenario s) {
    return s == Scenario::indoor_inh ? "indoor" : "outdoor";
}

SweepSpec parse_sweep(const std::string& v) {
    // "key:start:stop:count" or "key:v1,v2,..."
    SweepSpec sw;
    const auto parts = split(v, ':');
    if (parts.empty() || parts[0].empty()) throw ConfigError("config: empty sweep spec");
    sw.key = parts[0];
    if (parts.size() == 2) {
        for (const std::string& x : split(parts[1], ','))
            sw.values.push_back(parse_double("sweep", x));
    } else if (parts.size() == 4) {
        const double start = parse_double("sweep", parts[1]);
        const double stop = parse_double("sweep", parts[2]);
        const long count = parse_long("sweep", parts[3]);
        if (count < 1) throw ConfigError("config: sweep count must be >= 1");
        for (long i = 0; i < count; ++i)
            sw.values.push_back(count == 1 ? start
                                           : start + (stop - start) * i / (count - 1));
    } else {
        throw ConfigError("config: sweep must be key:start:stop:count or key:v1,v2,...");
    }
    if (sw.values.empty()) throw ConfigError("config: sweep has no values");
    return sw;
}

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

double SystemConfig::symbol_rate_hz() const {
    return static_cast<double>(t) / (block_duration_us * 1e-6);
}

double SystemConfig::noise_power_dbm() const {
    return -174.0 + 10.0 * std::log10(symbol_rate_hz()) + noise_figure_db;
}

void SystemConfig::apply_line(const std::string& key, const std::string& value) {
    if (key == "m") m = static_cast<int>(parse_long(key, value));
    else if (key == "n") n = static_cast<int>(parse_long(key, value));
    else if (key == "l") l = static_cast<int>(parse_long(key, value));
    else if (key == "t") t = static_cast<int>(parse_long(key, value));
    else if (key == "q") q = static_cast<int>(parse_long(key, value));
    else if (key == "mode") {
        modes.clear();
        for (const std::string& s : split(value, ',')) modes.push_back(mode_from_name(s));
    } else if (key == "scenario") {
        scenarios.clear();
        for (const std::string& s : split(value, ','))
            scenarios.push_back(scenario_from_name(s));
    } else if (key == "decoder") decoder = decoder_from_name(value);
    else if (key == "psk_order") psk_order = static_cast<int>(parse_long(key, value));
    else if (key == "fsk_order") fsk_order = static_cast<int>(parse_long(key, value));
    else if (key == "qam") qam = parse_bool(key, value);
    else if (key == "tx_power_dbm") tx_power_dbm = parse_double(key, value);
    else if (key == "noise_figure_db") noise_figure_db = parse_double(key, value);
    else if (key == "carrier_ghz") carrier_ghz = parse_double(key, value);
    else if (key == "r_min_m") r_min_m = parse_double(key, value);
    else if (key == "r_max_m") r_max_m = parse_double(key, value);
    else if (key == "shadow_mean_db") shadow_mean_db = parse_double(key, value);
    else if (key == "shadow_var_db2") shadow_var_db2 = parse_double(key, value);
    else if (key == "n_taps") n_taps = static_cast<int>(parse_long(key, value));
    else if (key == "pdp") pdp = value;
    else if (key == "pdp_decay_db") pdp_decay_db = parse_double(key, value);
    else if (key == "fd_norm") fd_norm = parse_double(key, value);
    else if (key == "sos_oscillators") sos_oscillators = static_cast<int>(parse_long(key, value));
    else if (key == "block_duration_us") block_duration_us = parse_double(key, value);
    else if (key == "guard_samples") guard_samples = static_cast<int>(parse_long(key, value));
    else if (key == "subband_spacing_hz") subband_spacing_hz = parse_double(key, value);
    else if (key == "stf_subbands") stf_subbands = static_cast<int>(parse_long(key, value));
    else if (key == "codebook_construction") codebook_construction = value;
    else if (key == "codebook_criterion") codebook_criterion = value;
    else if (key == "codebook_budget") codebook_budget = static_cast<int>(parse_long(key, value));
    else if (key == "codebook_file") codebook_file = value;
    else if (key == "pilot_len") pilot_len = static_cast<int>(parse_long(key, value));
    else if (key == "perfect_csi") perfect_csi = parse_bool(key, value);
    else if (key == "assignment") assignment = value;
    else if (key == "outage_threshold_db") outage_threshold_db = parse_double(key, value);
    else if (key == "allow_overload") allow_overload = parse_bool(key, value);
    else if (key == "n_trials") n_trials = parse_long(key, value);
    else if (key == "master_seed") master_seed = static_cast<std::uint64_t>(parse_long(key, value));
    else if (key == "sweep") sweep = parse_sweep(value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

void SystemConfig::apply_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        apply_line(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
}

void SystemConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_text(ss.str());
}

SystemConfig SystemConfig::from_text(const std::string& text) {
    SystemConfig cfg;
    cfg.apply_text(text);
    return cfg;
}

SystemConfig SystemConfig::from_file(const std::string& path) {
    SystemConfig cfg;
    cfg.apply_file(path);
    return cfg;
}

void SystemConfig::validate() const {
    if (m < 1) throw ConfigError("config: M >= 1 violated (M=" + std::to_string(m) + ")");
    if (n < 1) throw ConfigError("config: N >= 1 violated (N=" + std::to_string(n) + ")");
    if (n_trials < 1) throw ConfigError("config: n_trials >= 1 violated");
    auto check_m = [&](int v, const char* name) {
        if (v < m && !allow_overload)
            throw ConfigError(std::string("config: ") + name + " >= M violated (" + name + "=" +
                              std::to_string(v) + " < M=" + std::to_string(m) + ")");
    };
    check_m(t, "T");
    check_m(l, "L");
    check_m(q, "Q");
    // the sweep may drive m upward; gate those values too
    if (sweep.key == "m" && !allow_overload) {
        for (double v : sweep.values) {
            const int mv = static_cast<int>(v);
            if (t < mv || l < mv || q < mv)
                throw ConfigError("config: sweep over m exceeds T/L/Q (m=" + std::to_string(mv) +
                                  "); set allow_overload to permit block sharing");
        }
    }
    if (modes.empty()) throw ConfigError("config: no modes selected");
    if (scenarios.empty()) throw ConfigError("config: no scenarios selected");
    if (psk_order < 2) throw ConfigError("config: psk_order >= 2 violated");
    if (fsk_order < 2) throw ConfigError("config: fsk_order >= 2 violated");
    if (n_taps < 1) throw ConfigError("config: n_taps >= 1 violated");
    if (pdp != "exp" && pdp != "uniform") throw ConfigError("config: pdp must be exp or uniform");
    if (fd_norm < 0) throw ConfigError("config: fd_norm >= 0 violated");
    if (sos_oscillators < 16)
        throw ConfigError("config: sos_oscillators >= 16 violated");
    if (!(r_min_m > 0 && r_min_m < r_max_m))
        throw ConfigError("config: 0 < r_min_m < r_max_m violated");
    if (shadow_var_db2 < 0) throw ConfigError("config: shadow_var_db2 >= 0 violated");
    if (codebook_budget < 1) throw ConfigError("config: codebook_budget >= 1 violated");
    if (assignment != "random" && assignment != "fixed")
        throw ConfigError("config: assignment must be random or fixed");
    const std::vector<std::string> sweepable = {"", "tx_power_dbm", "n", "m"};
    bool ok = false;
    for (const std::string& k : sweepable) ok = ok || sweep.key == k;
    if (!ok) throw ConfigError("config: sweep key '" + sweep.key + "' not supported");
}

std::string SystemConfig::to_text() const {
    std::ostringstream out;
    out << "m = " << m << "\n";
    out << "n = " << n << "\n";
    out << "l = " << l << "\n";
    out << "t = " << t << "\n";
    out << "q = " << q << "\n";
    out << "mode = ";
    for (std::size_t i = 0; i < modes.size(); ++i)
        out << (i ? "," : "") << mode_name(modes[i]);
    out << "\n";
    out << "scenario = ";
    for (std::size_t i = 0; i < scenarios.size(); ++i)
        out << (i ? "," : "") << scenario_name(scenarios[i]);
    out << "\n";
    out << "decoder = " << decoder_name(decoder) << "\n";
    out << "psk_order = " << psk_order << "\n";
    out << "fsk_order = " << fsk_order << "\n";
    out << "qam = " << (qam ? "true" : "false") << "\n";
    out << "tx_power_dbm = " << fmt(tx_power_dbm) << "\n";
    out << "noise_figure_db = " << fmt(noise_figure_db) << "\n";
    out << "carrier_ghz = " << fmt(carrier_ghz) << "\n";
    out << "r_min_m = " << fmt(r_min_m) << "\n";
    out << "r_max_m = " << fmt(r_max_m) << "\n";
    out << "shadow_mean_db = " << fmt(shadow_mean_db) << "\n";
    out << "shadow_var_db2 = " << fmt(shadow_var_db2) << "\n";
    out << "n_taps = " << n_taps << "\n";
    out << "pdp = " << pdp << "\n";
    out << "pdp_decay_db = " << fmt(pdp_decay_db) << "\n";
    out << "fd_norm = " << fmt(fd_norm) << "\n";
    out << "sos_oscillators = " << sos_oscillators << "\n";
    out << "block_duration_us = " << fmt(block_duration_us) << "\n";
    out << "guard_samples = " << guard_samples << "\n";
    out << "subband_spacing_hz = " << fmt(subband_spacing_hz) << "\n";
    out << "stf_subbands = " << stf_subbands << "\n";
    out << "codebook_construction = " << codebook_construction << "\n";
    out << "codebook_criterion = " << codebook_criterion << "\n";
    out << "codebook_budget = " << codebook_budget << "\n";
    if (!codebook_file.empty()) out << "codebook_file = " << codebook_file << "\n";
    out << "pilot_len = " << pilot_len << "\n";
    out << "perfect_csi = " << (perfect_csi ? "true" : "false") << "\n";
    out << "assignment = " << assignment << "\n";
    out << "outage_threshold_db = " << fmt(outage_threshold_db) << "\n";
    out << "allow_overload = " << (allow_overload ? "true" : "false") << "\n";
    out << "n_trials = " << n_trials << "\n";
    out << "master_seed = " << master_seed << "\n";
    if (!sweep.key.empty()) {
        out << "sweep = " << sweep.key << ":";
        for (std::size_t i = 0; i < sweep.values.size(); ++i)
            out << (i ? "," : "") << fmt(sweep.values[i]);
        out << "\n";
    }
    return out.str();
}

SystemConfig preset(const std::string& name) {
    SystemConfig c;
    c.modes = {Mode::none, Mode::st, Mode::sf, Mode::stf};
    c.scenarios = {Scenario::indoor_inh};
    c.decoder = DecoderKind::ml;
    c.n_trials = 10000;
    c.master_seed = 20221001;
    if (name == "fig3") {
        c.m = 8; c.n = 64; c.l = 8; c.t = 8; c.q = 8;
        c.scenarios = {Scenario::outdoor_umi, Scenario::indoor_inh};
        c.sweep = {"tx_power_dbm", {-35, -28, -21, -14, -7, 0, 7}};
        c.n_trials = 2500;
    } else if (name == "fig4") {
        c.m = 16; c.n = 100; c.l = 20; c.t = 20; c.q = 20;
        c.scenarios = {Scenario::outdoor_umi, Scenario::indoor_inh};
        c.sweep = {"tx_power_dbm", {-35, -28, -21, -14, -7, 0, 7}};
        c.n_trials = 1200;
    } else if (name == "fig5") {
        c.m = 8; c.n = 64; c.l = 8; c.t = 8; c.q = 8;
        c.tx_power_dbm = 30.0;
        c.allow_overload = true;
        c.sweep = {"m", {8, 16, 24, 32, 40}};
        c.n_trials = 1000;
    } else if (name == "fig6") {
        c.m = 8; c.n = 64; c.l = 8; c.t = 8; c.q = 8;
        c.sweep = {"tx_power_dbm", {-35, -30, -25, -20, -15, -10, -5, 0, 5, 10}};
        c.n_trials = 2500;
    } else if (name == "fig7") {
        c.m = 8; c.n = 8; c.l = 8; c.t = 8; c.q = 8;
        c.modes = {Mode::st, Mode::sf, Mode::stf};
        c.tx_power_dbm = -12.0;
        c.sweep = {"n", {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120}};
        c.n_trials = 1250;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5", "fig6", "fig7"}; }

}  // namespace stfs
