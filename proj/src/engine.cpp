#include "stfspread/engine.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "stfspread/channel.hpp"

namespace stfs {

double coherence_loss(double fd_norm, double duration_samples) {
    if (fd_norm <= 0.0 || duration_samples <= 0.0) return 0.0;
    const double d = duration_samples;
    const int steps = 512;  // Simpson over [0, d]
    const double h = d / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double u = i * h;
        const double f = (d - u) * std::cyl_bessel_j(0.0, 2.0 * M_PI * fd_norm * u);
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f;
    }
    acc *= h / 3.0;
    const double loss = 1.0 - 2.0 * acc / (d * d);
    return std::clamp(loss, 0.0, 1.0);
}

namespace {

std::string fmt(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

const char* scenario_tag(Scenario s) { return s == Scenario::indoor_inh ? "indoor" : "outdoor"; }

// ---------------------------------------------------------------------------
// per-(mode, scenario, sweep point) execution context
// ---------------------------------------------------------------------------

struct CellContext {
    SystemConfig cfg;  // sweep value applied
    Mode mode = Mode::st;
    Scenario scenario = Scenario::indoor_inh;
    double sweep_value = 0.0;

    BlockGrid grid;
    Codebook codebook;
    Constellation coh;
    int n_tones = 1;
    int k_coh = 0;   // bits per coherent symbol
    int k_tone = 0;  // bits per tone

    double tx_amp = 1.0;  // sqrt of tx power in mW
    double sigma2 = 1.0;  // noise power per complex sample, mW
    std::vector<double> profile;
    double lj = 0.0;  // time-selectivity leakage of this mode's symbol

    int k_eff = 1;         // channel taps seen per subband
    int pilot_len = 8;     // P
    int pilot_section = 0; // P + k_eff - 1
    int total_len = 0;     // samples per subband timeline
    std::vector<cvec> pilot_rows;              // local pilot index -> sequence
    std::vector<PilotEstimator> estimators;    // by group size - 1

    bool wideband() const { return grid.n_subbands == 1; }
};

std::vector<double> build_profile(const SystemConfig& cfg) {
    return cfg.pdp == "uniform" ? uniform_profile(cfg.n_taps)
                                : exponential_profile(cfg.n_taps, cfg.pdp_decay_db);
}

Codebook build_codebook(const SystemConfig& cfg) {
    if (!cfg.codebook_file.empty()) {
        Codebook cb = load_codebook(cfg.codebook_file);
        if (cb.t() != cfg.t)
            throw ConfigError("codebook_file: vector length " + std::to_string(cb.t()) +
                              " does not match t=" + std::to_string(cfg.t));
        return cb;
    }
    const CodebookConstruction cons = cfg.codebook_construction == "unitary"
                                          ? CodebookConstruction::unitary
                                          : CodebookConstruction::random_gaussian;
    auto gen = [&](Rng& rng) {
        return cons == CodebookConstruction::unitary ? gen_unitary_codebook(cfg.q, cfg.t)
                                                     : gen_random_codebook(cfg.q, cfg.t, rng);
    };
    if (cfg.codebook_budget > 1) {
        OptimizeOptions opt;
        opt.criterion = cfg.codebook_criterion == "min_error_prob"
                            ? CodebookCriterion::min_error_prob
                        : cfg.codebook_criterion == "max_capacity"
                            ? CodebookCriterion::max_capacity
                            : CodebookCriterion::max_min_distance;
        opt.budget = cfg.codebook_budget;
        opt.constellation = cfg.qam ? make_qam(cfg.psk_order) : make_psk(cfg.psk_order);
        return optimize_codebook(gen, opt, cfg.master_seed);
    }
    Rng rng = Rng::stream(cfg.master_seed, tag(StreamTag::codebook), 0);
    Codebook cb = gen(rng);
    cb.seed = cfg.master_seed;
    return cb;
}

SystemConfig apply_sweep(const SystemConfig& base, double value) {
    SystemConfig cfg = base;
    if (base.sweep.key == "tx_power_dbm") cfg.tx_power_dbm = value;
    else if (base.sweep.key == "n") cfg.n = static_cast<int>(value);
    else if (base.sweep.key == "m") cfg.m = static_cast<int>(value);
    return cfg;
}

CellContext make_cell(const SystemConfig& base, Mode mode, Scenario scen, double sweep_value) {
    CellContext c;
    c.cfg = apply_sweep(base, sweep_value);
    c.mode = mode;
    c.scenario = scen;
    c.sweep_value = sweep_value;

    GridTiming timing;
    timing.block_duration_us = c.cfg.block_duration_us;
    timing.guard_samples = c.cfg.guard_samples;
    timing.stf_subbands = c.cfg.stf_subbands;
    timing.subband_spacing_hz = c.cfg.subband_spacing_hz;
    const int grid_l = c.cfg.allow_overload ? std::max(c.cfg.l, 1) : c.cfg.l;
    c.grid = build_grid(mode, grid_l, std::min(c.cfg.m, grid_l), c.cfg.t, c.cfg.n_taps, timing);

    c.codebook = build_codebook(c.cfg);
    c.coh = c.cfg.qam ? make_qam(c.cfg.psk_order) : make_psk(c.cfg.psk_order);
    c.k_coh = c.coh.bits_per_symbol();
    const Constellation fsk = make_fsk(c.cfg.fsk_order);
    c.k_tone = fsk.bits_per_symbol();
    c.n_tones = (mode == Mode::sf || mode == Mode::stf) ? c.cfg.fsk_order : 1;

    c.tx_amp = std::sqrt(linear_from_db(c.cfg.tx_power_dbm));
    c.sigma2 = linear_from_db(c.cfg.noise_power_dbm());
    c.profile = build_profile(c.cfg);

    const double symbol_duration =
        mode == Mode::none ? 1.0 : c.grid.symbol_duration_samples();
    c.lj = coherence_loss(c.cfg.fd_norm, symbol_duration);

    c.k_eff = c.wideband() ? c.cfg.n_taps : 1;
    if (c.wideband()) {
        c.pilot_len = std::max({c.cfg.pilot_len, c.cfg.m * c.cfg.n_taps, 8});
        c.pilot_rows = dft_pilots(c.cfg.m, c.pilot_len);
        c.estimators.emplace_back(c.pilot_rows, c.k_eff, Estimator::ls, c.sigma2);
    } else {
        const int per_block = (c.cfg.m + c.grid.l - 1) / c.grid.l;
        const int c_max = std::max(1, per_block * c.grid.n_slots);
        c.pilot_len = std::max({c.cfg.pilot_len, c_max, 8});
        c.pilot_rows = dft_pilots(c_max, c.pilot_len);
        for (int size = 1; size <= c_max; ++size) {
            std::vector<cvec> group(c.pilot_rows.begin(), c.pilot_rows.begin() + size);
            c.estimators.emplace_back(std::move(group), 1, Estimator::ls, c.sigma2);
        }
    }
    c.pilot_section = c.pilot_len + c.k_eff - 1;
    c.total_len = c.pilot_section + c.grid.n_slots * c.grid.block_len();
    return c;
}

// ---------------------------------------------------------------------------
// per-trial channel state shared by every cell
// ---------------------------------------------------------------------------

struct TrialChannels {
    Deployment dep;
    std::vector<double> shadow_db;
    std::vector<std::vector<TapSet>> taps;  // [device][antenna]
};

TrialChannels make_trial_channels(const SystemConfig& cfg, int m_max, int n_max, long trial,
                                  const std::vector<double>& profile) {
    TrialChannels tc;
    Rng dep_rng = Rng::stream(cfg.master_seed, tag(StreamTag::deploy), trial);
    tc.dep = deploy_nodes(m_max, cfg.r_min_m, cfg.r_max_m, dep_rng);
    tc.shadow_db.resize(m_max);
    for (int dev = 0; dev < m_max; ++dev) {
        Rng rng = Rng::stream(cfg.master_seed, tag(StreamTag::shadowing), trial, dev);
        tc.shadow_db[dev] = draw_shadowing(cfg.shadow_mean_db, cfg.shadow_var_db2, rng);
    }
    tc.taps.resize(m_max);
    for (int dev = 0; dev < m_max; ++dev) {
        tc.taps[dev].reserve(n_max);
        for (int ant = 0; ant < n_max; ++ant) {
            Rng rng = Rng::stream(cfg.master_seed, tag(StreamTag::taps), trial,
                                  (static_cast<std::uint64_t>(dev) << 20) | ant);
            tc.taps[dev].push_back(
                gen_taps(cfg.n_taps, profile, cfg.fd_norm, cfg.sos_oscillators, rng));
        }
    }
    return tc;
}

// ---------------------------------------------------------------------------
// one Monte-Carlo trial in one cell
// ---------------------------------------------------------------------------

struct Truth {
    int vector_index = 0;
    int tone = 0;
    int coh_label = 0;
    std::vector<int> coh_labels;  // baseline stream
    cvec x;                       // transmitted block samples (unit power scale)
};

void run_trial_cell(const CellContext& c, long trial, const TrialChannels& tc,
                    LinkRecord* out) {
    const int m = c.cfg.m;
    const int n = c.cfg.n;
    const int t = c.cfg.t;
    const int k_eff = c.k_eff;
    const int block_len = c.grid.block_len();
    const int n_sub = c.grid.n_subbands;
    const Mode mode = c.mode;

    // large-scale amplitudes (tx power folded in)
    std::vector<double> amp(m);
    for (int dev = 0; dev < m; ++dev) {
        const double pl = pathloss_db(c.scenario, tc.dep.positions[dev].radius_m,
                                      c.cfg.carrier_ghz);
        amp[dev] = c.tx_amp * std::pow(10.0, -(pl + tc.shadow_db[dev]) / 20.0);
    }

    // resource assignment and per-device data
    Assignment assign;
    if (c.cfg.assignment == "random") {
        Rng arng = Rng::stream(c.cfg.master_seed, tag(StreamTag::assignment), trial);
        assign = assign_blocks(c.grid, m, arng);
    } else {
        assign = identity_assignment(c.grid, m);
    }

    std::vector<Truth> truth(m);
    for (int dev = 0; dev < m; ++dev) {
        Truth& tr = truth[dev];
        if (mode != Mode::none) {
            Rng vrng = Rng::stream(c.cfg.master_seed, tag(StreamTag::vector_choice), trial, dev);
            tr.vector_index = static_cast<int>(vrng.uniform_index(c.codebook.q()));
        }
        Rng brng = Rng::stream(c.cfg.master_seed, tag(StreamTag::bits), trial, dev);
        auto draw_bits = [&](int count) {
            std::vector<int> b(count);
            for (int& x : b) x = static_cast<int>(brng.next_u64() & 1);
            return b;
        };
        switch (mode) {
            case Mode::none: {
                const std::vector<int> bits = draw_bits(t * c.k_coh);
                tr.coh_labels = modulate_indices(bits, c.coh);
                tr.x.resize(t);
                for (int i = 0; i < t; ++i) tr.x[i] = c.coh.points[tr.coh_labels[i]];
                break;
            }
            case Mode::st: {
                const std::vector<int> bits = draw_bits(c.k_coh);
                tr.coh_label = modulate_indices(bits, c.coh)[0];
                tr.x.resize(t);
                for (int i = 0; i < t; ++i)
                    tr.x[i] = c.coh.points[tr.coh_label] * c.codebook.vectors[tr.vector_index][i];
                break;
            }
            case Mode::sf: {
                const std::vector<int> bits = draw_bits(c.k_tone);
                tr.tone = modulate_indices(bits, make_fsk(c.cfg.fsk_order))[0];
                tr.x.resize(t);
                for (int i = 0; i < t; ++i)
                    tr.x[i] = c.codebook.vectors[tr.vector_index][i] *
                              std::polar(1.0, 2.0 * M_PI * tr.tone * i / t);
                break;
            }
            case Mode::stf: {
                const std::vector<int> bits = draw_bits(c.k_coh + c.k_tone);
                auto [b_coh, b_tone] = split_stream(bits, c.k_coh, c.k_tone);
                tr.coh_label = modulate_indices(b_coh, c.coh)[0];
                tr.tone = modulate_indices(b_tone, make_fsk(c.cfg.fsk_order))[0];
                tr.x.resize(t);
                for (int i = 0; i < t; ++i)
                    tr.x[i] = c.coh.points[tr.coh_label] *
                              c.codebook.vectors[tr.vector_index][i] *
                              std::polar(1.0, 2.0 * M_PI * tr.tone * i / t);
                break;
            }
        }
    }

    // tap values at the pilot instant and at each device's data block
    std::vector<double> t_data(m);
    for (int dev = 0; dev < m; ++dev) {
        const int slot = c.grid.slot_of(assign[dev]);
        t_data[dev] =
            static_cast<double>(c.pilot_section + slot * block_len) * n_sub;
    }
    // [dev][ant] -> k_eff taps, composite (large-scale included)
    std::vector<std::vector<cvec>> h_pilot(m), h_data(m);
    for (int dev = 0; dev < m; ++dev) {
        h_pilot[dev].resize(n);
        h_data[dev].resize(n);
        const int sb = c.grid.subband_of(assign[dev]);
        for (int ant = 0; ant < n; ++ant) {
            const TapSet& ts = tc.taps[dev][ant];
            if (c.wideband()) {
                cvec hp = ts.values_at(0.0);
                cvec hd = ts.values_at(t_data[dev]);
                for (cplx& v : hp) v *= amp[dev];
                for (cplx& v : hd) v *= amp[dev];
                h_pilot[dev][ant] = std::move(hp);
                h_data[dev][ant] = std::move(hd);
            } else {
                h_pilot[dev][ant] = {ts.subband_gain(sb, n_sub, 0.0) * amp[dev]};
                h_data[dev][ant] = {ts.subband_gain(sb, n_sub, t_data[dev]) * amp[dev]};
            }
        }
    }

    // local pilot indices within each subband
    std::vector<int> pilot_local(m, 0);
    std::vector<std::vector<int>> subband_groups(n_sub);
    for (int dev = 0; dev < m; ++dev) {
        const int sb = c.grid.subband_of(assign[dev]);
        pilot_local[dev] = static_cast<int>(subband_groups[sb].size());
        subband_groups[sb].push_back(dev);
    }

    // received frames: [ant] x [subband][sample]
    std::vector<Frame> rx(n, Frame(n_sub, c.total_len));
    for (int dev = 0; dev < m; ++dev) {
        const int sb = c.grid.subband_of(assign[dev]);
        const int data_start = c.pilot_section + c.grid.slot_of(assign[dev]) * block_len;
        const cvec& pilot = c.pilot_rows[pilot_local[dev]];
        const cvec& x = truth[dev].x;
        for (int ant = 0; ant < n; ++ant) {
            const cvec& hp = h_pilot[dev][ant];
            const cvec& hd = h_data[dev][ant];
            Frame& r = rx[ant];
            for (std::size_t i = 0; i < pilot.size(); ++i)
                for (std::size_t k = 0; k < hp.size(); ++k)
                    r.at(sb, static_cast<int>(i + k)) += pilot[i] * hp[k];
            for (int i = 0; i < t; ++i)
                for (std::size_t k = 0; k < hd.size(); ++k)
                    r.at(sb, data_start + i + static_cast<int>(k)) += x[i] * hd[k];
        }
    }
    for (int ant = 0; ant < n; ++ant) {
        Rng nrng = Rng::stream(c.cfg.master_seed, tag(StreamTag::noise), trial, ant);
        for (cplx& v : rx[ant].data) v += nrng.cnormal(c.sigma2);
    }

    // channel estimation (per antenna, per subband group)
    std::vector<std::vector<cvec>> est(m, std::vector<cvec>(n));
    if (c.cfg.perfect_csi) {
        est = h_data;
    } else if (c.wideband()) {
        const PilotEstimator& pe = c.estimators[0];
        cvec obs(pe.obs_len());
        for (int ant = 0; ant < n; ++ant) {
            for (int i = 0; i < pe.obs_len(); ++i) obs[i] = rx[ant].at(0, i);
            std::vector<cvec> all = pe.estimate(obs);
            for (int dev = 0; dev < m; ++dev) est[dev][ant] = std::move(all[dev]);
        }
    } else {
        for (int sb = 0; sb < n_sub; ++sb) {
            const auto& group = subband_groups[sb];
            if (group.empty()) continue;
            const PilotEstimator& pe = c.estimators[group.size() - 1];
            cvec obs(pe.obs_len());
            for (int ant = 0; ant < n; ++ant) {
                for (int i = 0; i < pe.obs_len(); ++i) obs[i] = rx[ant].at(sb, i);
                std::vector<cvec> all = pe.estimate(obs);
                for (std::size_t gi = 0; gi < group.size(); ++gi)
                    est[group[gi]][ant] = std::move(all[gi]);
            }
        }
    }

    // decode and per-link statistics
    const Constellation fsk = make_fsk(c.cfg.fsk_order);
    std::vector<double> p_rx(m, 0.0), kappa_base(m, 0.0);
    for (int dev = 0; dev < m; ++dev) {
        // realized per-tap received power averaged across antennas
        std::vector<double> pi(k_eff, 0.0);
        for (int ant = 0; ant < n; ++ant)
            for (int k = 0; k < k_eff; ++k) pi[k] += std::norm(h_data[dev][ant][k]);
        for (double& v : pi) v /= n;
        double total = 0.0;
        for (double v : pi) total += v;
        p_rx[dev] = total;
        double kappa = c.lj;
        if (c.wideband() && mode != Mode::none) {
            // resolvability-weighted delay-dispersion index
            InterfererProfile prof;
            prof.tap_powers.resize(k_eff);
            prof.tap_delays_sym.resize(k_eff);
            double p_res = 0.0;
            for (int k = 0; k < k_eff; ++k) {
                const double w = pi[k] / (pi[k] + c.sigma2 / n);
                prof.tap_powers[k] = pi[k] * w;
                prof.tap_delays_sym[k] = static_cast<double>(k);
                p_res += prof.tap_powers[k];
            }
            prof.received_power = p_res;
            const double db = interference_power_db({prof});
            kappa += (total > 0.0 && std::isfinite(db)) ? linear_from_db(db) / total : 0.0;
        } else if (mode == Mode::none) {
            InterfererProfile prof;
            prof.tap_powers.resize(k_eff);
            prof.tap_delays_sym.resize(k_eff);
            double p_res = 0.0;
            for (int k = 0; k < k_eff; ++k) {
                const double w = pi[k] / (pi[k] + c.sigma2 / n);
                prof.tap_powers[k] = pi[k] * w;
                prof.tap_delays_sym[k] = static_cast<double>(k);
                p_res += prof.tap_powers[k];
            }
            prof.received_power = p_res;
            const double db = interference_power_db({prof});
            kappa += (total > 0.0 && std::isfinite(db)) ? linear_from_db(db) / total : 0.0;
            kappa += 1.0;  // full co-channel overlap of the unspread stream
        }
        kappa_base[dev] = kappa;
    }
    double kappa_p_sum = 0.0;
    for (int dev = 0; dev < m; ++dev) kappa_p_sum += p_rx[dev] * kappa_base[dev];

    for (int dev = 0; dev < m; ++dev) {
        LinkRecord& rec = out[dev];
        rec = LinkRecord{};
        const Truth& tr = truth[dev];

        // demapped block observation per antenna
        std::vector<cvec> obs(n);
        const int sb = c.grid.subband_of(assign[dev]);
        const int data_start = c.pilot_section + c.grid.slot_of(assign[dev]) * block_len;
        for (int ant = 0; ant < n; ++ant) {
            obs[ant].resize(block_len);
            for (int i = 0; i < block_len; ++i) obs[ant][i] = rx[ant].at(sb, data_start + i);
        }

        DecodeProblem p;
        p.obs = &obs;
        p.taps_est = &est[dev];
        p.codebook = &c.codebook;
        p.constellation = &c.coh;
        p.t = t;
        p.noise_power = c.sigma2;

        switch (mode) {
            case Mode::none: {
                // conventional serial receiver: equalize, combine, slice
                cvec combined(t, cplx(0.0, 0.0));
                double wsum = 0.0;
                for (int ant = 0; ant < n; ++ant) {
                    auto [eq, flag] = zf_equalize(obs[ant], est[dev][ant]);
                    (void)flag;
                    double hp = 0.0;
                    for (const cplx& v : est[dev][ant]) hp += std::norm(v);
                    for (int i = 0; i < t; ++i) combined[i] += hp * eq[i];
                    wsum += hp;
                }
                if (wsum > 0.0)
                    for (cplx& v : combined) v /= wsum;
                rec.bits_total = t * c.k_coh;
                rec.symbols_total = t;
                for (int i = 0; i < t; ++i) {
                    int best = 0;
                    double bd = std::numeric_limits<double>::infinity();
                    for (int s = 0; s < c.coh.order; ++s) {
                        const double d = std::norm(combined[i] - c.coh.points[s]);
                        if (d < bd - 1e-15) {
                            bd = d;
                            best = s;
                        }
                    }
                    if (best != tr.coh_labels[i]) ++rec.symbol_errors;
                    const auto db = bits_from_index(best, c.k_coh);
                    const auto tb = bits_from_index(tr.coh_labels[i], c.k_coh);
                    for (int b = 0; b < c.k_coh; ++b)
                        if (db[b] != tb[b]) ++rec.bit_errors;
                }
                break;
            }
            case Mode::st: {
                p.n_tones = 1;
                const Decision d = decode(c.cfg.decoder, p);
                rec.vector_total = 1;
                rec.vector_errors = d.vector_index != tr.vector_index;
                rec.symbols_total = 1;
                rec.symbol_errors = d.symbol_index != tr.coh_label;
                rec.bits_total = c.k_coh;
                const auto db = bits_from_index(d.symbol_index, c.k_coh);
                const auto tb = bits_from_index(tr.coh_label, c.k_coh);
                for (int b = 0; b < c.k_coh; ++b)
                    if (db[b] != tb[b]) ++rec.bit_errors;
                break;
            }
            case Mode::sf: {
                std::vector<cvec> eq(n);
                for (int ant = 0; ant < n; ++ant)
                    eq[ant] = zf_equalize(obs[ant], est[dev][ant]).first;
                auto [qd, toned] = square_law_bank(eq, c.codebook, c.n_tones, t);
                rec.vector_total = 1;
                rec.vector_errors = qd != tr.vector_index;
                rec.symbols_total = 1;
                rec.symbol_errors = toned != tr.tone;
                rec.bits_total = c.k_tone;
                const auto db = bits_from_index(toned, c.k_tone);
                const auto tb = bits_from_index(tr.tone, c.k_tone);
                for (int b = 0; b < c.k_tone; ++b)
                    if (db[b] != tb[b]) ++rec.bit_errors;
                break;
            }
            case Mode::stf: {
                std::vector<cvec> eq(n);
                for (int ant = 0; ant < n; ++ant)
                    eq[ant] = zf_equalize(obs[ant], est[dev][ant]).first;
                auto [qd1, toned] = square_law_bank(eq, c.codebook, c.n_tones, t);
                (void)qd1;
                Decision d;
                if (n_sub > 1) {
                    // flat subband: derotating the detected tone is exact
                    std::vector<cvec> derot(n, cvec(block_len));
                    for (int ant = 0; ant < n; ++ant)
                        for (int i = 0; i < block_len; ++i)
                            derot[ant][i] = obs[ant][i] *
                                            std::polar(1.0, -2.0 * M_PI * toned * i / t);
                    DecodeProblem p2 = p;
                    p2.obs = &derot;
                    p2.n_tones = 1;
                    d = decode(c.cfg.decoder, p2);
                    d.tone = toned;
                } else {
                    p.n_tones = c.n_tones;
                    d = decode(c.cfg.decoder, p);
                }
                rec.vector_total = 1;
                rec.vector_errors = d.vector_index != tr.vector_index;
                rec.symbols_total = 2;
                rec.symbol_errors = (d.symbol_index != tr.coh_label) + (d.tone != tr.tone);
                rec.bits_total = c.k_coh + c.k_tone;
                const auto dcb = bits_from_index(d.symbol_index, c.k_coh);
                const auto tcb = bits_from_index(tr.coh_label, c.k_coh);
                for (int b = 0; b < c.k_coh; ++b)
                    if (dcb[b] != tcb[b]) ++rec.bit_errors;
                const auto dtb = bits_from_index(d.tone, c.k_tone);
                const auto ttb = bits_from_index(tr.tone, c.k_tone);
                for (int b = 0; b < c.k_tone; ++b)
                    if (dtb[b] != ttb[b]) ++rec.bit_errors;
                break;
            }
        }

        // post-combining signal energy through the estimated-template combiner
        double tmpl_norm = 0.0;
        cplx match(0.0, 0.0);
        for (int ant = 0; ant < n; ++ant) {
            const cvec tmpl = convolve(tr.x, est[dev][ant], block_len);
            const cvec serv = convolve(tr.x, h_data[dev][ant], block_len);
            for (int i = 0; i < block_len; ++i) {
                tmpl_norm += std::norm(tmpl[i]);
                match += std::conj(tmpl[i]) * serv[i];
            }
        }
        const double s_post = tmpl_norm > 0.0 ? std::norm(match) / tmpl_norm : 0.0;

        // interference index: dense delay/Doppler leakage plus direct
        // collision terms for shared blocks
        double i_lin = kappa_p_sum - p_rx[dev] * kappa_base[dev];
        if (mode != Mode::none) {
            for (int other = 0; other < m; ++other) {
                if (other == dev || assign[other] != assign[dev]) continue;
                const DispersionVector& va = c.codebook.vectors[tr.vector_index];
                const DispersionVector& vb = c.codebook.vectors[truth[other].vector_index];
                cplx dot(0.0, 0.0);
                double na = 0.0, nb = 0.0;
                for (int i = 0; i < t; ++i) {
                    dot += va[i] * std::conj(vb[i]);
                    na += std::norm(va[i]);
                    nb += std::norm(vb[i]);
                }
                double sep = (na > 0 && nb > 0) ? std::norm(dot) / (na * nb) : 1.0;
                if (c.n_tones > 1 && truth[other].tone != tr.tone) sep = 0.0;
                i_lin += p_rx[other] * sep;
            }
        }
        const double i_post = static_cast<double>(n) * i_lin;

        rec.serving_energy = s_post;
        rec.interference_power = i_post;
        rec.noise_power = c.sigma2;
        rec.sinr_linear = s_post / (i_post + c.sigma2);
        rec.interference_metric = i_post;
    }
}

// ---------------------------------------------------------------------------
// experiment driver
// ---------------------------------------------------------------------------

void run_cells(const SystemConfig& base, const std::vector<CellContext*>& cells,
               std::vector<std::vector<LinkRecord>>& records, int workers) {
    int m_max = 0, n_max = 0;
    for (const CellContext* c : cells) {
        m_max = std::max(m_max, c->cfg.m);
        n_max = std::max(n_max, c->cfg.n);
    }
    const std::vector<double> profile = build_profile(base);
    const long n_trials = base.n_trials;
    for (std::size_t ci = 0; ci < cells.size(); ++ci)
        records[ci].assign(static_cast<std::size_t>(n_trials) * cells[ci]->cfg.m, LinkRecord{});

    std::atomic<long> next_trial{0};
    auto worker_fn = [&]() {
        for (;;) {
            const long trial = next_trial.fetch_add(1);
            if (trial >= n_trials) break;
            const TrialChannels tc = make_trial_channels(base, m_max, n_max, trial, profile);
            for (std::size_t ci = 0; ci < cells.size(); ++ci) {
                LinkRecord* out =
                    records[ci].data() + static_cast<std::size_t>(trial) * cells[ci]->cfg.m;
                run_trial_cell(*cells[ci], trial, tc, out);
            }
        }
    };
    const int nw = std::max(1, workers);
    if (nw == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int i = 0; i < nw; ++i) pool.emplace_back(worker_fn);
        for (std::thread& th : pool) th.join();
    }
}

void append_cell_rows(ResultTable& table, const CellContext& c,
                      const std::vector<LinkRecord>& recs, const SystemConfig& base) {
    const std::string suffix =
        std::string(".") + mode_name(c.mode) + "." + scenario_tag(c.scenario);
    auto add = [&](const std::string& name, double est, double lo, double hi) {
        table.rows.push_back(
            {c.sweep_value, name + suffix, est, lo, hi, base.n_trials, base.master_seed});
    };

    const double thr = linear_from_db(c.cfg.outage_threshold_db);
    long below = 0;
    for (const LinkRecord& r : recs)
        if (r.sinr_linear < thr) ++below;
    const Interval wi = wilson_interval(below, static_cast<long>(recs.size()));
    add("outage", static_cast<double>(below) / recs.size(), wi.lo, wi.hi);

    std::vector<double> interf;
    interf.reserve(recs.size());
    for (const LinkRecord& r : recs) interf.push_back(r.interference_metric);
    const MeanCi ic = mean_ci(interf);
    add("interference_db", db_from_linear(ic.mean), db_from_linear(std::max(ic.lo, 0.0)),
        db_from_linear(ic.hi));

    std::vector<double> sinr_db;
    sinr_db.reserve(recs.size());
    for (const LinkRecord& r : recs)
        sinr_db.push_back(std::max(-400.0, db_from_linear(std::max(r.sinr_linear, 1e-40))));
    const MeanCi sc = mean_ci(sinr_db);
    add("output_sinr_db", sc.mean, sc.lo, sc.hi);

    long bt = 0, be = 0, st = 0, se = 0, vt = 0, ve = 0;
    for (const LinkRecord& r : recs) {
        bt += r.bits_total;
        be += r.bit_errors;
        st += r.symbols_total;
        se += r.symbol_errors;
        vt += r.vector_total;
        ve += r.vector_errors;
    }
    const Interval bi = wilson_interval(be, std::max(bt, 1L));
    add("ber", bt > 0 ? static_cast<double>(be) / bt : 0.0, bi.lo, bi.hi);
    const Interval si = wilson_interval(se, std::max(st, 1L));
    add("ser", st > 0 ? static_cast<double>(se) / st : 0.0, si.lo, si.hi);
    if (vt > 0) {
        const Interval vi = wilson_interval(ve, vt);
        add("ver", static_cast<double>(ve) / vt, vi.lo, vi.hi);
    }
}

}  // namespace

ResultTable run_experiment(const SystemConfig& cfg, int workers) {
    cfg.validate();
    const std::vector<double> sweep_values =
        cfg.sweep.key.empty() ? std::vector<double>{0.0} : cfg.sweep.values;

    std::vector<CellContext> cells;
    for (Mode mode : cfg.modes)
        for (Scenario scen : cfg.scenarios)
            for (double v : sweep_values) cells.push_back(make_cell(cfg, mode, scen, v));

    std::vector<CellContext*> ptrs;
    for (CellContext& c : cells) ptrs.push_back(&c);
    std::vector<std::vector<LinkRecord>> records(cells.size());
    run_cells(cfg, ptrs, records, workers);

    ResultTable table;
    for (std::size_t ci = 0; ci < cells.size(); ++ci)
        append_cell_rows(table, cells[ci], records[ci], cfg);
    return table;
}

std::vector<LinkRecord> run_cell(const SystemConfig& cfg, Mode mode, Scenario scenario,
                                 double sweep_value, int workers) {
    cfg.validate();
    CellContext cell = make_cell(cfg, mode, scenario, sweep_value);
    std::vector<CellContext*> ptrs = {&cell};
    std::vector<std::vector<LinkRecord>> records(1);
    SystemConfig base = cfg;
    base.m = std::max(base.m, cell.cfg.m);
    base.n = std::max(base.n, cell.cfg.n);
    run_cells(base, ptrs, records, workers);
    return std::move(records[0]);
}

std::string to_csv(const ResultTable& table) {
    std::string out = "sweep_value,metric,estimate,ci_lo,ci_hi,n,seed\n";
    for (const ResultRow& r : table.rows) {
        out += fmt(r.sweep_value);
        out += ',';
        out += r.metric;
        out += ',';
        out += fmt(r.estimate);
        out += ',';
        out += fmt(r.ci_lo);
        out += ',';
        out += fmt(r.ci_hi);
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

ResultTable parse_csv_text(const std::string& text) {
    ResultTable table;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> f;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        f.push_back(cur);
        if (f.size() != 7) throw IoError("result csv: malformed row '" + line + "'");
        ResultRow r;
        auto num = [&](const std::string& s) {
            double v = 0.0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw IoError("result csv: bad number '" + s + "'");
            return v;
        };
        r.sweep_value = num(f[0]);
        r.metric = f[1];
        r.estimate = num(f[2]);
        r.ci_lo = num(f[3]);
        r.ci_hi = num(f[4]);
        r.n = std::stol(f[5]);
        r.seed = std::stoull(f[6]);
        table.rows.push_back(std::move(r));
    }
    return table;
}

namespace {

std::string json_number(double v) {
    if (std::isfinite(v)) return fmt(v);
    if (v > 0) return "\"inf\"";
    return "\"-inf\"";
}

}  // namespace

std::string to_json(const ResultTable& table) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const ResultRow& r = table.rows[i];
        out += "  {\"sweep_value\": " + json_number(r.sweep_value) + ", \"metric\": \"" +
               r.metric + "\", \"estimate\": " + json_number(r.estimate) +
               ", \"ci_lo\": " + json_number(r.ci_lo) + ", \"ci_hi\": " + json_number(r.ci_hi) +
               ", \"n\": " + std::to_string(r.n) + ", \"seed\": " + std::to_string(r.seed) + "}";
        if (i + 1 < table.rows.size()) out += ",";
        out += "\n";
    }
    out += "]\n";
    return out;
}

std::string to_plotdata(const ResultTable& table) {
    // one whitespace-delimited series per metric (mode and scenario are part
    // of the metric name)
    std::vector<std::string> order;
    std::map<std::string, std::string> series;
    for (const ResultRow& r : table.rows) {
        if (series.find(r.metric) == series.end()) {
            order.push_back(r.metric);
            series[r.metric] = "# " + r.metric + "\n";
        }
        series[r.metric] += fmt(r.sweep_value) + " " + fmt(r.estimate) + " " + fmt(r.ci_lo) +
                            " " + fmt(r.ci_hi) + "\n";
    }
    std::string out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        out += series[order[i]];
        if (i + 1 < order.size()) out += "\n";
    }
    return out;
}

void emit_results(const ResultTable& table, const std::string& format, const std::string& path) {
    if (table.rows.empty()) throw ConfigError("emit_results: empty table");
    std::string body;
    if (format == "csv") body = to_csv(table);
    else if (format == "json") body = to_json(table);
    else if (format == "plotdata") body = to_plotdata(table);
    else throw ConfigError("emit_results: unknown format '" + format + "'");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_results: cannot write '" + path + "'");
    out << body;
    if (!out) throw IoError("emit_results: write failed for '" + path + "'");
}

}  // namespace stfs
