#pragma once

#include <cstdint>
#include <vector>

#include "stfspread/codebook.hpp"
#include "stfspread/rng.hpp"
#include "stfspread/types.hpp"

namespace stfs {

enum class Mode { none, st, sf, stf };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct GridTiming {
    double block_duration_us = 10.0;
    int guard_samples = -1;     // -1: n_taps - 1
    int stf_subbands = 0;       // 0: auto (closest divisor of L to 32/T)
    double subband_spacing_hz = 10.0;  // guard band between adjacent subbands
};

// Disjoint (time slot, subband) cells of one transmission frame. Each block
// carries T spread samples followed by a guard that absorbs delay spill.
struct BlockGrid {
    Mode mode = Mode::st;
    int l = 1;            // block count
    int t = 1;            // spread samples per block
    int guard = 0;        // trailing samples per block
    int n_slots = 1;
    int n_subbands = 1;
    double block_duration_us = 10.0;
    double subband_spacing_hz = 10.0;

    int block_len() const { return t + guard; }
    int samples_per_subband() const { return n_slots * block_len(); }
    int slot_of(int block) const { return block % n_slots; }
    int subband_of(int block) const { return block / n_slots; }
    // duration of one spread symbol in wideband sample periods
    double symbol_duration_samples() const { return static_cast<double>(t) * n_subbands; }
};

// l >= m required for the spreading modes; mode none uses a single shared
// block regardless of l.
BlockGrid build_grid(Mode mode, int l, int m, int t, int n_taps, const GridTiming& timing);

// device -> block index; injective whenever l >= m, round-robin over blocks
// otherwise (overload operation).
using Assignment = std::vector<int>;

Assignment assign_blocks(const BlockGrid& grid, int m, Rng& rng);
Assignment identity_assignment(const BlockGrid& grid, int m);

// Place one spread symbol onto the assigned block. `symbol` multiplies the
// dispersion vector; `tone` rotates sample i by exp(j*2*pi*tone*i/T) (0 for
// tone-free modes).
Frame spread(cplx symbol, int tone, const DispersionVector& vector, int block,
             const BlockGrid& grid);

// Per-antenna extraction of one device's block observation (block_len
// samples). In stf mode the subband is selected before the time slot.
cvec demap_block(const Frame& rx, const BlockGrid& grid, int block);

std::vector<cvec> demap(const std::vector<Frame>& rx, const BlockGrid& grid,
                        const Assignment& assignment, int device);

}  // namespace stfs
