#include "stfspread/modem.hpp"

#include <cmath>
#include <stdexcept>

namespace stfs {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int log2i(int v) {
    int b = 0;
    while ((1 << b) < v) ++b;
    return b;
}

}  // namespace

int Constellation::bits_per_symbol() const { return log2i(order); }

int gray_encode(int v) { return v ^ (v >> 1); }

int gray_decode(int g) {
    int v = 0;
    for (; g; g >>= 1) v ^= g;
    return v;
}

Constellation make_psk(int order) {
    if (!is_power_of_two(order) || order < 2)
        throw std::invalid_argument("make_psk: order must be a power of 2 >= 2");
    Constellation c;
    c.kind = ModKind::psk;
    c.order = order;
    c.points.resize(order);
    for (int i = 0; i < order; ++i) {
        // point for Gray label i sits at angle of the binary index
        const int pos = gray_decode(i);
        double angle = 2.0 * M_PI * pos / order;
        if (order == 4) angle += M_PI / 4.0;  // QPSK on diagonals
        c.points[i] = std::polar(1.0, angle);
    }
    // BPSK convention: bit 0 -> +1, bit 1 -> -1
    if (order == 2) {
        c.points[0] = {1.0, 0.0};
        c.points[1] = {-1.0, 0.0};
    }
    return c;
}

Constellation make_qam(int order) {
    if (!is_power_of_two(order) || order < 4)
        throw std::invalid_argument("make_qam: order must be a power of 2 >= 4");
    const int bits = log2i(order);
    if (bits % 2 != 0) throw std::invalid_argument("make_qam: order must be a square");
    const int side = 1 << (bits / 2);
    Constellation c;
    c.kind = ModKind::qam;
    c.order = order;
    c.points.resize(order);
    // unit average energy: E = 2*(side^2-1)/3 per axis pair
    const double scale = std::sqrt(3.0 / (2.0 * (side * side - 1)));
    for (int label = 0; label < order; ++label) {
        const int gi = label >> (bits / 2);
        const int gq = label & (side - 1);
        const int i = gray_decode(gi);
        const int q = gray_decode(gq);
        c.points[label] = cplx((2 * i - side + 1) * scale, (2 * q - side + 1) * scale);
    }
    return c;
}

Constellation make_fsk(int order) {
    if (!is_power_of_two(order) || order < 2)
        throw std::invalid_argument("make_fsk: order must be a power of 2 >= 2");
    Constellation c;
    c.kind = ModKind::fsk;
    c.order = order;
    return c;
}

std::vector<int> modulate_indices(const std::vector<int>& bits, const Constellation& c) {
    const int k = c.bits_per_symbol();
    if (bits.size() % k != 0)
        throw std::invalid_argument("modulate: bit count not divisible by bits/symbol");
    std::vector<int> out;
    out.reserve(bits.size() / k);
    for (std::size_t i = 0; i < bits.size(); i += k) {
        int label = 0;
        for (int b = 0; b < k; ++b) label = (label << 1) | (bits[i + b] & 1);
        out.push_back(label);
    }
    return out;
}

cvec modulate(const std::vector<int>& bits, const Constellation& c) {
    const std::vector<int> idx = modulate_indices(bits, c);
    cvec out;
    out.reserve(idx.size());
    for (int label : idx) {
        if (c.kind == ModKind::fsk)
            out.push_back(cplx(static_cast<double>(label), 0.0));
        else
            out.push_back(c.points[label]);
    }
    return out;
}

std::vector<int> bits_from_index(int index, int n_bits) {
    std::vector<int> bits(n_bits);
    for (int b = 0; b < n_bits; ++b) bits[b] = (index >> (n_bits - 1 - b)) & 1;
    return bits;
}

std::pair<std::vector<int>, std::vector<int>> split_stream(const std::vector<int>& bits,
                                                           int k1, int k2) {
    if (k1 < 0 || k2 < 0 || k1 + k2 <= 0)
        throw std::invalid_argument("split_stream: invalid ratio");
    if (bits.size() % static_cast<std::size_t>(k1 + k2) != 0)
        throw std::invalid_argument("split_stream: bit count not divisible by k1+k2");
    std::vector<int> s1, s2;
    for (std::size_t i = 0; i < bits.size(); i += k1 + k2) {
        for (int b = 0; b < k1; ++b) s1.push_back(bits[i + b]);
        for (int b = 0; b < k2; ++b) s2.push_back(bits[i + k1 + b]);
    }
    return {s1, s2};
}

std::vector<int> merge_streams(const std::vector<int>& s1, const std::vector<int>& s2,
                               int k1, int k2) {
    std::vector<int> bits;
    const std::size_t chunks = (k1 > 0) ? s1.size() / k1 : s2.size() / k2;
    for (std::size_t c = 0; c < chunks; ++c) {
        for (int b = 0; b < k1; ++b) bits.push_back(s1[c * k1 + b]);
        for (int b = 0; b < k2; ++b) bits.push_back(s2[c * k2 + b]);
    }
    return bits;
}

int square_law_detect(const std::vector<std::vector<double>>& tone_energies) {
    if (tone_energies.empty() || tone_energies[0].empty())
        throw std::invalid_argument("square_law_detect: empty observation");
    const std::size_t order = tone_energies[0].size();
    int best = 0;
    double best_e = -1.0;
    for (std::size_t t = 0; t < order; ++t) {
        double e = 0.0;
        for (const auto& ant : tone_energies) e += ant[t];
        if (e > best_e) {
            best_e = e;
            best = static_cast<int>(t);
        }
    }
    return best;
}

}  // namespace stfs
