#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stfspread/types.hpp"

namespace stfs {

enum class ModKind { psk, qam, fsk };

// PSK/QAM: unit average symbol energy, Gray-mapped.
// FSK: tone indices; tones are complex exponentials exp(j*2*pi*tone*i/T) over
// the T samples of a block, orthogonal at spacing 1/T.
struct Constellation {
    ModKind kind = ModKind::psk;
    int order = 4;
    cvec points;  // PSK/QAM only

    int bits_per_symbol() const;
};

Constellation make_psk(int order);
Constellation make_qam(int order);  // square QAM, order in {4, 16, 64, ...}
Constellation make_fsk(int order);

// Gray-mapped modulation. PSK/QAM returns constellation points; for FSK the
// returned values are tone indices stored in the real part.
std::vector<int> modulate_indices(const std::vector<int>& bits, const Constellation& c);
cvec modulate(const std::vector<int>& bits, const Constellation& c);

// Gray decode of a detected symbol index back to bits.
std::vector<int> bits_from_index(int index, int n_bits);
int gray_encode(int v);
int gray_decode(int g);

// Interleaved split: per chunk of k1+k2 bits, first k1 go to the first
// stream and the next k2 to the second.
std::pair<std::vector<int>, std::vector<int>> split_stream(const std::vector<int>& bits,
                                                           int k1, int k2);
std::vector<int> merge_streams(const std::vector<int>& s1, const std::vector<int>& s2,
                               int k1, int k2);

// Noncoherent tone decision: argmax over tones of the energy summed across
// antennas; ties break to the lowest index.
int square_law_detect(const std::vector<std::vector<double>>& tone_energies);

}  // namespace stfs
