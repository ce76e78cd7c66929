#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stfspread/codebook.hpp"
#include "stfspread/modem.hpp"
#include "stfspread/types.hpp"

namespace stfs {

enum class Estimator { ls, mmse };
enum class DecoderKind { ml, zf, mmse, mf };

DecoderKind decoder_from_name(const std::string& name);
const char* decoder_name(DecoderKind k);

// Linear convolution of x with a tap response, truncated to out_len.
cvec convolve(const cvec& x, const cvec& taps, int out_len);

// Rows of a DFT matrix; pairwise orthogonal by construction.
std::vector<cvec> dft_pilots(int count, int length);

// Joint least-squares (optionally MMSE-shrunk) tap estimation for devices
// whose pilots overlap on one timeline. Solves all devices at once, so it
// also covers the fully colliding baseline. The normal-equation factor is
// built once per pilot set and reused across antennas and trials.
class PilotEstimator {
public:
    // pilots: one sequence per device (pairwise orthogonal required);
    // prior_tap_power: length n_devices*n_taps, used by the mmse estimator.
    PilotEstimator(std::vector<cvec> pilots, int n_taps, Estimator kind, double noise_power,
                   std::vector<double> prior_tap_power = {});

    int obs_len() const { return obs_len_; }

    // obs: one antenna's pilot-section observation (length obs_len()).
    // Returns per-device tap estimates [device][tap].
    std::vector<cvec> estimate(const cvec& obs) const;

private:
    std::vector<cvec> pilots_;
    int n_taps_;
    int n_dev_;
    int obs_len_;
    std::vector<cvec> chol_;  // lower Cholesky factor of the regularized Gram
};

// Regularized frequency-domain deconvolution over one block. Returns the
// equalized block and a flag set when the tap response has a spectral null.
std::pair<cvec, bool> zf_equalize(const cvec& block_obs, const cvec& taps,
                                  double eps_rel = 1e-8);

struct Decision {
    int vector_index = 0;
    int tone = 0;
    int symbol_index = 0;  // constellation label; 0 when no coherent symbol
    double cost = 0.0;
};

struct DecodeProblem {
    const std::vector<cvec>* obs = nullptr;       // [antenna][block_len]
    const std::vector<cvec>* taps_est = nullptr;  // [antenna][n_taps or 1]
    const Codebook* codebook = nullptr;
    const Constellation* constellation = nullptr;  // nullptr: fixed unit symbol
    int n_tones = 1;
    int t = 0;
    double noise_power = 1.0;
};

// Exhaustive joint search over (vector, tone, symbol) minimizing the summed
// per-antenna residual; ties break to the lowest (vector, tone, symbol).
Decision ml_decode(const DecodeProblem& p);

// Cost of one specific hypothesis under the ml metric (argmin certificate).
double hypothesis_cost(const DecodeProblem& p, int vector_index, int tone, int symbol_index);

// Equalize-and-slice decoders; vector index by matched correlation.
Decision zf_decode(const DecodeProblem& p);
Decision mmse_decode(const DecodeProblem& p);
Decision mf_decode(const DecodeProblem& p);

Decision decode(DecoderKind kind, const DecodeProblem& p);

// Noncoherent matched-energy bank over (vector, tone); energies are summed
// across antennas, ties break low. Used for tone detection.
std::pair<int, int> square_law_bank(const std::vector<cvec>& eq_obs, const Codebook& cb,
                                    int n_tones, int t);

}  // namespace stfs
