#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stfspread/config.hpp"
#include "stfspread/metrics.hpp"

namespace stfs {

struct ResultRow {
    double sweep_value = 0.0;
    std::string metric;  // "<name>.<mode>.<scenario>"
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    long n = 0;
    std::uint64_t seed = 0;

    bool operator==(const ResultRow& o) const = default;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    bool operator==(const ResultTable& o) const = default;
};

// Runs the full sweep: for every (mode, scenario, sweep value) the Monte-
// Carlo trials are executed, aggregated and appended in deterministic order.
// Results are bit-identical for a given (config, master_seed) regardless of
// worker count.
ResultTable run_experiment(const SystemConfig& cfg, int workers = 1);

// Per-link records of one cell, exposed for targeted experiments and tests.
std::vector<LinkRecord> run_cell(const SystemConfig& cfg, Mode mode, Scenario scenario,
                                 double sweep_value, int workers = 1);

std::string to_csv(const ResultTable& table);
ResultTable parse_csv_text(const std::string& text);
std::string to_json(const ResultTable& table);
std::string to_plotdata(const ResultTable& table);

// format: csv | json | plotdata
void emit_results(const ResultTable& table, const std::string& format, const std::string& path);

// Fraction of a symbol's power scattered by channel time variation over a
// symbol lasting `duration_samples` at normalized Doppler fd.
double coherence_loss(double fd_norm, double duration_samples);

}  // namespace stfs
