#pragma once

#include <vector>

#include "stfspread/rng.hpp"
#include "stfspread/scenario.hpp"
#include "stfspread/types.hpp"

namespace stfs {

// Power-delay profile; weights sum to 1.
std::vector<double> exponential_profile(int n_taps, double decay_db_per_tap);
std::vector<double> uniform_profile(int n_taps);

// One fading tap as a sum of Gaussian-amplitude oscillators. The arrival
// angles cover the circle uniformly (randomly rotated comb), so the ensemble
// autocorrelation equals J0(2*pi*fd*lag); with complex Gaussian amplitudes
// the marginal at every instant is exactly circular Gaussian for any
// oscillator count.
struct SosTap {
    double power = 1.0;
    std::vector<cplx> amp;      // per-oscillator complex Gaussian amplitude
    std::vector<double> omega;  // per-oscillator 2*pi*fd*cos(alpha_n)

    cplx value_at(double t) const {
        cplx acc(0.0, 0.0);
        for (std::size_t n = 0; n < omega.size(); ++n) {
            if (omega[n] == 0.0 || t == 0.0)
                acc += amp[n];
            else
                acc += amp[n] * std::polar(1.0, omega[n] * t);
        }
        return acc;
    }
};

// Multipath state of one (device, antenna) link. Time is counted in wideband
// sample periods; fd_norm is the Doppler shift per sample period.
struct TapSet {
    std::vector<SosTap> taps;
    double fd_norm = 0.0;
    double time = 0.0;

    int n_taps() const { return static_cast<int>(taps.size()); }
    cvec values() const { return values_at(time); }
    cvec values_at(double t) const {
        cvec v(taps.size());
        for (std::size_t k = 0; k < taps.size(); ++k) v[k] = taps[k].value_at(t);
        return v;
    }
    // Flat effective gain of one narrow subband: the tap response evaluated at
    // the subband centre frequency.
    cplx subband_gain(int subband, int n_subbands, double t) const {
        cplx h(0.0, 0.0);
        const double nu = (subband + 0.5) / n_subbands;
        for (std::size_t k = 0; k < taps.size(); ++k)
            h += taps[k].value_at(t) * std::polar(1.0, -2.0 * M_PI * nu * static_cast<double>(k));
        return h;
    }
};

TapSet gen_taps(int n_taps, const std::vector<double>& profile, double fd_norm, int n_oscillators,
                Rng& rng);

// Advance the process by `steps` sample periods; marginals are unchanged.
void evolve_doppler(TapSet& state, double steps);

// Large-scale amplitude plus small-scale taps of one (device, antenna) link.
struct LinkChannel {
    double amplitude = 1.0;  // large-scale voltage gain
    TapSet small_scale;
};

// Per-device transmit frames superposed at every gateway antenna with AWGN.
// channels[device][antenna]; wideband frames (one subband) convolve with the
// tap response, narrow subbands multiply by the flat subband gain. Taps are
// evaluated at `tap_eval_time[device]` (defaults to each state's own clock).
std::vector<Frame> mac_superpose(const std::vector<Frame>& frames,
                                 const std::vector<std::vector<LinkChannel>>& channels,
                                 double noise_power, Rng& rng,
                                 const std::vector<double>* tap_eval_time = nullptr);

}  // namespace stfs
