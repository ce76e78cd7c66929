#include "stfspread/spreading.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stfs {

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::none: return "none";
        case Mode::st: return "st";
        case Mode::sf: return "sf";
        case Mode::stf: return "stf";
    }
    return "?";
}

Mode mode_from_name(const std::string& name) {
    if (name == "none") return Mode::none;
    if (name == "st") return Mode::st;
    if (name == "sf") return Mode::sf;
    if (name == "stf") return Mode::stf;
    throw ConfigError("unknown mode '" + name + "'");
}

namespace {

// closest divisor of l to the target subband count, preferring >= 2
int auto_stf_subbands(int l, int t) {
    const double target = 32.0 / std::max(1, t);
    int best = l;  // fall back to all-frequency split
    double best_err = 1e300;
    for (int d = 1; d <= l; ++d) {
        if (l % d != 0) continue;
        if (d == 1 && l > 1) continue;  // degenerate pure-time lattice
        const double err = std::abs(std::log(static_cast<double>(d) / target));
        if (err < best_err) {
            best_err = err;
            best = d;
        }
    }
    return best;
}

}  // namespace

BlockGrid build_grid(Mode mode, int l, int m, int t, int n_taps, const GridTiming& timing) {
    if (m < 1 || t < 1) throw ConfigError("build_grid: require m >= 1, t >= 1");
    BlockGrid g;
    g.mode = mode;
    g.t = t;
    g.guard = timing.guard_samples >= 0 ? timing.guard_samples : std::max(0, n_taps - 1);
    g.block_duration_us = timing.block_duration_us;
    g.subband_spacing_hz = timing.subband_spacing_hz;

    switch (mode) {
        case Mode::none:
            g.l = 1;
            g.n_slots = 1;
            g.n_subbands = 1;
            break;
        case Mode::st:
            if (l < m) throw ConfigError("build_grid: L >= M violated (L=" + std::to_string(l) +
                                         " < M=" + std::to_string(m) + ")");
            g.l = l;
            g.n_slots = l;
            g.n_subbands = 1;
            break;
        case Mode::sf:
            if (l < m) throw ConfigError("build_grid: L >= M violated (L=" + std::to_string(l) +
                                         " < M=" + std::to_string(m) + ")");
            g.l = l;
            g.n_slots = 1;
            g.n_subbands = l;
            break;
        case Mode::stf: {
            if (l < m) throw ConfigError("build_grid: L >= M violated (L=" + std::to_string(l) +
                                         " < M=" + std::to_string(m) + ")");
            g.l = l;
            g.n_subbands = timing.stf_subbands > 0 ? timing.stf_subbands : auto_stf_subbands(l, t);
            if (l % g.n_subbands != 0)
                throw ConfigError("build_grid: stf_subbands must divide L");
            g.n_slots = l / g.n_subbands;
            break;
        }
    }
    return g;
}

Assignment assign_blocks(const BlockGrid& grid, int m, Rng& rng) {
    if (grid.mode == Mode::none) return Assignment(m, 0);
    Assignment a(m);
    std::vector<int> blocks(grid.l);
    std::iota(blocks.begin(), blocks.end(), 0);
    // Fisher-Yates; for m > l the shuffled list is dealt round-robin
    for (int i = grid.l - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_index(i + 1));
        std::swap(blocks[i], blocks[j]);
    }
    for (int dev = 0; dev < m; ++dev) a[dev] = blocks[dev % grid.l];
    return a;
}

Assignment identity_assignment(const BlockGrid& grid, int m) {
    Assignment a(m);
    for (int dev = 0; dev < m; ++dev) a[dev] = grid.mode == Mode::none ? 0 : dev % grid.l;
    return a;
}

Frame spread(cplx symbol, int tone, const DispersionVector& vector, int block,
             const BlockGrid& grid) {
    if (static_cast<int>(vector.size()) != grid.t)
        throw std::invalid_argument("spread: vector length does not match grid T");
    if (block < 0 || block >= grid.l) throw std::invalid_argument("spread: block out of range");
    Frame f(grid.n_subbands, grid.samples_per_subband());
    const int sb = grid.subband_of(block);
    const int start = grid.slot_of(block) * grid.block_len();
    for (int i = 0; i < grid.t; ++i) {
        const double rot = 2.0 * M_PI * tone * i / grid.t;
        f.at(sb, start + i) = symbol * vector[i] * std::polar(1.0, rot);
    }
    return f;
}

cvec demap_block(const Frame& rx, const BlockGrid& grid, int block) {
    if (block < 0 || block >= grid.l)
        throw std::invalid_argument("demap: assignment references block out of range");
    const int sb = grid.subband_of(block);      // sf extraction first
    const int start = grid.slot_of(block) * grid.block_len();  // then st
    cvec obs(grid.block_len());
    for (int i = 0; i < grid.block_len(); ++i) obs[i] = rx.at(sb, start + i);
    return obs;
}

std::vector<cvec> demap(const std::vector<Frame>& rx, const BlockGrid& grid,
                        const Assignment& assignment, int device) {
    std::vector<cvec> out;
    out.reserve(rx.size());
    for (const Frame& antenna_rx : rx)
        out.push_back(demap_block(antenna_rx, grid, assignment.at(device)));
    return out;
}

}  // namespace stfs
