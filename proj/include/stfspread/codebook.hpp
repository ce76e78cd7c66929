#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stfspread/modem.hpp"
#include "stfspread/rng.hpp"
#include "stfspread/types.hpp"

namespace stfs {

enum class CodebookConstruction { random_gaussian, unitary };
enum class CodebookCriterion { max_min_distance, min_error_prob, max_capacity };

// A spreading vector of length T. Every constructed vector satisfies the
// power constraint sum(|v_i|^2) == T exactly (enforced by a final
// renormalization).
using DispersionVector = cvec;

struct Codebook {
    std::vector<DispersionVector> vectors;
    CodebookConstruction construction = CodebookConstruction::random_gaussian;
    CodebookCriterion criterion = CodebookCriterion::max_min_distance;
    std::uint64_t seed = 0;

    int q() const { return static_cast<int>(vectors.size()); }
    int t() const { return vectors.empty() ? 0 : static_cast<int>(vectors[0].size()); }
};

// Scale v so that sum(|v_i|^2) == t exactly.
void renormalize_power(DispersionVector& v);

// One non-zero entry per vector: random position, magnitude sqrt(T), phase
// taken from a complex Gaussian draw.
Codebook gen_random_codebook(int q, int t, Rng& rng);

// Columns of a DFT matrix of size max(m, t), truncated to length t and
// rescaled. For m <= t the outputs are exactly orthogonal.
Codebook gen_unitary_codebook(int m, int t);

struct OptimizeOptions {
    CodebookCriterion criterion = CodebookCriterion::max_min_distance;
    int budget = 1;
    Constellation constellation = make_psk(2);
    double snr_db = 10.0;  // operating point for the error-probability score
};

// Score of a codebook under the given criterion (higher is better).
double score_codebook(const Codebook& cb, const OptimizeOptions& opt);

// Budgeted random-restart search over generated candidates; candidate i is
// drawn from substream i of `seed`, so a larger budget scores a superset of
// the same candidates.
Codebook optimize_codebook(const std::function<Codebook(Rng&)>& generator,
                           const OptimizeOptions& opt, std::uint64_t seed);

// Plain-text persistence: header lines (q, t, construction, criterion, seed)
// followed by one row of re/im pairs per vector at full precision.
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

}  // namespace stfs
