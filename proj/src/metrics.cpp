#include "stfspread/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stfs {

double output_sinr_db(double serving, double interference, double noise) {
    if (!(noise > 0.0)) throw ConfigError("output_sinr: noise power must be > 0");
    if (serving < 0.0 || interference < 0.0)
        throw std::domain_error("output_sinr: powers must be >= 0");
    return db_from_linear(serving / (interference + noise));
}

double link_outage_probability(const std::vector<LinkRecord>& records, double threshold_db) {
    if (records.empty()) throw std::invalid_argument("link_outage_probability: empty record set");
    const double thr = linear_from_db(threshold_db);
    long below = 0;
    for (const LinkRecord& r : records)
        if (r.sinr_linear < thr) ++below;
    return static_cast<double>(below) / records.size();
}

double interference_power_db(const std::vector<InterfererProfile>& interferers) {
    double sum = 0.0;
    for (const InterfererProfile& it : interferers) {
        if (it.tap_powers.empty()) continue;
        if (it.tap_powers.size() != it.tap_delays_sym.size())
            throw std::invalid_argument("interference_power: profile size mismatch");
        double p = 0.0, m1 = 0.0, m2 = 0.0;
        for (std::size_t k = 0; k < it.tap_powers.size(); ++k) {
            p += it.tap_powers[k];
            m1 += it.tap_powers[k] * it.tap_delays_sym[k];
            m2 += it.tap_powers[k] * it.tap_delays_sym[k] * it.tap_delays_sym[k];
        }
        if (p <= 0.0) continue;
        sum += it.received_power * (m1 / p + m2 / p);
    }
    if (sum <= 0.0) return -std::numeric_limits<double>::infinity();
    return db_from_linear(sum);
}

ErrorRates error_rates(const std::vector<LinkRecord>& records) {
    if (records.empty()) throw std::invalid_argument("error_rates: empty record set");
    long bits = 0, bit_err = 0, syms = 0, sym_err = 0, vecs = 0, vec_err = 0;
    for (const LinkRecord& r : records) {
        bits += r.bits_total;
        bit_err += r.bit_errors;
        syms += r.symbols_total;
        sym_err += r.symbol_errors;
        vecs += r.vector_total;
        vec_err += r.vector_errors;
    }
    ErrorRates e;
    e.ber = bits > 0 ? static_cast<double>(bit_err) / bits : 0.0;
    e.ser = syms > 0 ? static_cast<double>(sym_err) / syms : 0.0;
    e.ver = vecs > 0 ? static_cast<double>(vec_err) / vecs : 0.0;
    return e;
}

Interval wilson_interval(long successes, long total) {
    if (total <= 0) throw std::invalid_argument("wilson_interval: total must be > 0");
    const double z = 1.959963984540054;  // 97.5% quantile
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

MeanCi mean_ci(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mean_ci: empty sample");
    double m = 0.0;
    for (double v : values) m += v;
    m /= values.size();
    double var = 0.0;
    for (double v : values) var += (v - m) * (v - m);
    var = values.size() > 1 ? var / (values.size() - 1) : 0.0;
    const double half = 1.959963984540054 * std::sqrt(var / values.size());
    return {m, m - half, m + half};
}

}  // namespace stfs
