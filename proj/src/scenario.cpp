#include "stfspread/scenario.hpp"

#include <cmath>

namespace stfs {

Deployment deploy_nodes(int m, double r_min_m, double r_max_m, Rng& rng) {
    if (!(r_min_m > 0.0) || !(r_min_m < r_max_m))
        throw ConfigError("deploy_nodes: require 0 < r_min < r_max");
    if (m < 1) throw ConfigError("deploy_nodes: require m >= 1");

    Deployment d;
    d.positions.reserve(m);
    const double lo2 = r_min_m * r_min_m;
    const double hi2 = r_max_m * r_max_m;
    for (int i = 0; i < m; ++i) {
        const double r = std::sqrt(lo2 + rng.uniform() * (hi2 - lo2));
        const double th = rng.uniform() * 2.0 * M_PI;
        d.positions.push_back({r, th});
    }
    return d;
}

double pathloss_db(Scenario scenario, double distance_m, double carrier_ghz) {
    if (!(distance_m > 0.0)) throw std::domain_error("pathloss_db: distance must be > 0");
    if (!(carrier_ghz > 0.0)) throw std::domain_error("pathloss_db: carrier must be > 0");

    switch (scenario) {
        case Scenario::outdoor_umi:
            return 35.3 * std::log10(distance_m) + 22.4 + 21.3 * std::log10(carrier_ghz);
        case Scenario::indoor_inh:
            return 38.3 * std::log10(distance_m) + 17.30 + 24.9 * std::log10(carrier_ghz);
    }
    throw std::domain_error("pathloss_db: unknown scenario");
}

double draw_shadowing(double mean_db, double variance_db2, Rng& rng) {
    if (variance_db2 < 0.0) throw std::domain_error("draw_shadowing: variance must be >= 0");
    return rng.normal(mean_db, std::sqrt(variance_db2));
}

}  // namespace stfs
