#include "stfspread/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace stfs {

std::vector<double> exponential_profile(int n_taps, double decay_db_per_tap) {
    if (n_taps < 1) throw std::domain_error("exponential_profile: n_taps must be >= 1");
    const double r = std::pow(10.0, -decay_db_per_tap / 10.0);
    std::vector<double> p(n_taps);
    double w = 1.0, sum = 0.0;
    for (int k = 0; k < n_taps; ++k, w *= r) {
        p[k] = w;
        sum += w;
    }
    for (double& x : p) x /= sum;
    return p;
}

std::vector<double> uniform_profile(int n_taps) {
    if (n_taps < 1) throw std::domain_error("uniform_profile: n_taps must be >= 1");
    return std::vector<double>(n_taps, 1.0 / n_taps);
}

TapSet gen_taps(int n_taps, const std::vector<double>& profile, double fd_norm,
                int n_oscillators, Rng& rng) {
    if (n_taps < 1) throw std::domain_error("gen_taps: n_taps must be >= 1");
    if (static_cast<int>(profile.size()) != n_taps)
        throw std::domain_error("gen_taps: profile size mismatch");
    double sum = 0.0;
    for (double p : profile) {
        if (p < 0.0) throw std::domain_error("gen_taps: negative profile weight");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("gen_taps: profile must sum to 1");
    if (fd_norm < 0.0) throw std::domain_error("gen_taps: fd_norm must be >= 0");
    if (n_oscillators < 1) throw std::domain_error("gen_taps: n_oscillators must be >= 1");

    TapSet ts;
    ts.fd_norm = fd_norm;
    ts.taps.resize(n_taps);
    for (int k = 0; k < n_taps; ++k) {
        SosTap& tap = ts.taps[k];
        tap.power = profile[k];
        tap.omega.resize(n_oscillators);
        tap.amp.resize(n_oscillators);
        const double offset = rng.uniform();  // rotates the angle comb per tap
        for (int n = 0; n < n_oscillators; ++n) {
            const double alpha = 2.0 * M_PI * (n + offset) / n_oscillators;
            tap.omega[n] = 2.0 * M_PI * fd_norm * std::cos(alpha);
            tap.amp[n] = rng.cnormal(profile[k] / n_oscillators);
        }
    }
    return ts;
}

void evolve_doppler(TapSet& state, double steps) { state.time += steps; }

std::vector<Frame> mac_superpose(const std::vector<Frame>& frames,
                                 const std::vector<std::vector<LinkChannel>>& channels,
                                 double noise_power, Rng& rng,
                                 const std::vector<double>* tap_eval_time) {
    if (frames.empty()) throw std::invalid_argument("mac_superpose: no frames");
    if (channels.size() != frames.size())
        throw std::invalid_argument("mac_superpose: channel/frame count mismatch");
    const int n_sub = frames[0].n_subbands;
    const int n_samp = frames[0].n_samples;
    for (const Frame& f : frames)
        if (f.n_subbands != n_sub || f.n_samples != n_samp)
            throw std::invalid_argument("mac_superpose: frame shape mismatch");
    const std::size_t n_ant = channels[0].size();
    for (const auto& row : channels)
        if (row.size() != n_ant)
            throw std::invalid_argument("mac_superpose: antenna count mismatch");

    std::vector<Frame> rx(n_ant, Frame(n_sub, n_samp));
    for (std::size_t dev = 0; dev < frames.size(); ++dev) {
        const Frame& f = frames[dev];
        const double t_eval =
            tap_eval_time ? (*tap_eval_time)[dev] : channels[dev][0].small_scale.time;
        for (std::size_t ant = 0; ant < n_ant; ++ant) {
            const LinkChannel& link = channels[dev][ant];
            const double g = link.amplitude;
            if (n_sub == 1) {
                const cvec h = link.small_scale.values_at(t_eval);
                const int k_taps = static_cast<int>(h.size());
                for (int i = 0; i < n_samp; ++i) {
                    const cplx x = f.at(0, i);
                    if (x == cplx(0.0, 0.0)) continue;
                    for (int k = 0; k < k_taps && i + k < n_samp; ++k)
                        rx[ant].at(0, i + k) += g * h[k] * x;
                }
            } else {
                for (int b = 0; b < n_sub; ++b) {
                    // skip unoccupied subbands
                    bool occupied = false;
                    for (int i = 0; i < n_samp; ++i)
                        if (f.at(b, i) != cplx(0.0, 0.0)) {
                            occupied = true;
                            break;
                        }
                    if (!occupied) continue;
                    const cplx h = link.small_scale.subband_gain(b, n_sub, t_eval);
                    for (int i = 0; i < n_samp; ++i) rx[ant].at(b, i) += g * h * f.at(b, i);
                }
            }
        }
    }
    if (noise_power > 0.0) {
        for (std::size_t ant = 0; ant < n_ant; ++ant)
            for (cplx& v : rx[ant].data) v += rng.cnormal(noise_power);
    }
    return rx;
}

}  // namespace stfs
