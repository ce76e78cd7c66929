#pragma once

#include <vector>

#include "stfspread/rng.hpp"
#include "stfspread/types.hpp"

namespace stfs {

enum class Scenario { outdoor_umi, indoor_inh };

struct PolarPos {
    double radius_m = 0.0;
    double angle_rad = 0.0;
};

// Device positions on an annulus around the gateway at the origin.
struct Deployment {
    std::vector<PolarPos> positions;
};

struct LargeScaleGain {
    double pathloss_db = 0.0;
    double shadowing_db = 0.0;
    double total_db() const { return pathloss_db + shadowing_db; }
    // amplitude scale applied to the channel taps
    double amplitude() const { return std::pow(10.0, -total_db() / 20.0); }
};

// Uniform-over-area placement: radius CDF ~ (r^2 - rmin^2)/(rmax^2 - rmin^2).
Deployment deploy_nodes(int m, double r_min_m, double r_max_m, Rng& rng);

// Closed-form NLOS street-canyon / office losses, selected per scenario.
double pathloss_db(Scenario scenario, double distance_m, double carrier_ghz);

// Gaussian in the dB domain (log-normal in linear scale).
double draw_shadowing(double mean_db, double variance_db2, Rng& rng);

}  // namespace stfs
