#pragma once

#include <vector>

#include "stfspread/types.hpp"

namespace stfs {

// Per-link outcome of one Monte-Carlo trial. All powers are linear; the
// post-processing SINR is recomputable from its components.
struct LinkRecord {
    double serving_energy = 0.0;       // after receive combining
    double interference_power = 0.0;   // after receive combining
    double noise_power = 0.0;
    double sinr_linear = 0.0;
    double interference_metric = 0.0;  // delay-dispersion aggregate, linear
    int bits_total = 0;
    int bit_errors = 0;
    int symbols_total = 0;
    int symbol_errors = 0;
    int vector_total = 0;
    int vector_errors = 0;
};

double output_sinr_db(double serving, double interference, double noise);

// Fraction of (trial, link) records whose post-processing SINR falls below
// the threshold.
double link_outage_probability(const std::vector<LinkRecord>& records, double threshold_db);

// One interfering link as seen by the serving receiver: its received power
// and the realized power-delay profile at delays normalized to the reference
// symbol period.
struct InterfererProfile {
    double received_power = 0.0;          // linear
    std::vector<double> tap_powers;       // realized per-tap received power
    std::vector<double> tap_delays_sym;   // delay of each tap in symbol periods
};

// Aggregate delay-dispersion interference: sum over interferers of
// received_power * (tau_mean + tau_mean_square) of its profile. Returns dB;
// -inf when the sum is zero.
double interference_power_db(const std::vector<InterfererProfile>& interferers);

struct ErrorRates {
    double ber = 0.0;
    double ser = 0.0;
    double ver = 0.0;  // dispersion-vector index error rate
};

ErrorRates error_rates(const std::vector<LinkRecord>& records);

// Wilson 95% score interval for a binomial proportion.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};
Interval wilson_interval(long successes, long total);

// Mean with a normal-approximation 95% interval.
struct MeanCi {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};
MeanCi mean_ci(const std::vector<double>& values);

}  // namespace stfs
