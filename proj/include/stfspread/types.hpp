#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stfs {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Baseband signal over one transmission frame: a time series per subband.
// Wideband modes use a single subband spanning the whole bandwidth.
struct Frame {
    int n_subbands = 1;
    int n_samples = 0;  // samples per subband timeline
    cvec data;          // [subband][sample], row-major

    Frame() = default;
    Frame(int subbands, int samples)
        : n_subbands(subbands), n_samples(samples),
          data(static_cast<std::size_t>(subbands) * samples) {}

    cplx& at(int subband, int sample) {
        return data[static_cast<std::size_t>(subband) * n_samples + sample];
    }
    cplx at(int subband, int sample) const {
        return data[static_cast<std::size_t>(subband) * n_samples + sample];
    }
    double energy() const {
        double e = 0.0;
        for (const cplx& v : data) e += std::norm(v);
        return e;
    }
};

inline double db_from_linear(double linear) { return 10.0 * std::log10(linear); }
inline double linear_from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace stfs
