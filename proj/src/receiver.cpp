#include "stfspread/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stfs {

DecoderKind decoder_from_name(const std::string& name) {
    if (name == "ml") return DecoderKind::ml;
    if (name == "zf") return DecoderKind::zf;
    if (name == "mmse") return DecoderKind::mmse;
    if (name == "mf") return DecoderKind::mf;
    throw ConfigError("unknown decoder '" + name + "'");
}

const char* decoder_name(DecoderKind k) {
    switch (k) {
        case DecoderKind::ml: return "ml";
        case DecoderKind::zf: return "zf";
        case DecoderKind::mmse: return "mmse";
        case DecoderKind::mf: return "mf";
    }
    return "?";
}

cvec convolve(const cvec& x, const cvec& taps, int out_len) {
    cvec y(out_len, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == cplx(0.0, 0.0)) continue;
        for (std::size_t k = 0; k < taps.size(); ++k) {
            const std::size_t j = i + k;
            if (j < static_cast<std::size_t>(out_len)) y[j] += x[i] * taps[k];
        }
    }
    return y;
}

std::vector<cvec> dft_pilots(int count, int length) {
    if (count > length) throw ConfigError("dft_pilots: need length >= count for orthogonality");
    std::vector<cvec> p(count, cvec(length));
    for (int m = 0; m < count; ++m)
        for (int i = 0; i < length; ++i)
            p[m][i] = std::polar(1.0, 2.0 * M_PI * m * i / length);
    return p;
}

namespace {

// dense column-major hermitian solve helpers (complex Cholesky)
std::vector<cvec> cholesky(const std::vector<cvec>& a) {
    const std::size_t n = a.size();
    std::vector<cvec> l(n, cvec(n, cplx(0.0, 0.0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cplx sum = a[i][j];
            for (std::size_t k = 0; k < j; ++k) sum -= l[i][k] * std::conj(l[j][k]);
            if (i == j) {
                const double d = sum.real();
                if (d <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
                l[i][j] = std::sqrt(d);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    return l;
}

cvec chol_solve(const std::vector<cvec>& l, cvec b) {
    const std::size_t n = l.size();
    for (std::size_t i = 0; i < n; ++i) {  // forward
        for (std::size_t k = 0; k < i; ++k) b[i] -= l[i][k] * b[k];
        b[i] /= l[i][i];
    }
    for (std::size_t ii = n; ii-- > 0;) {  // backward with L^H
        for (std::size_t k = ii + 1; k < n; ++k) b[ii] -= std::conj(l[k][ii]) * b[k];
        b[ii] /= l[ii][ii];
    }
    return b;
}

}  // namespace

PilotEstimator::PilotEstimator(std::vector<cvec> pilots, int n_taps, Estimator kind,
                               double noise_power, std::vector<double> prior_tap_power)
    : pilots_(std::move(pilots)), n_taps_(n_taps) {
    n_dev_ = static_cast<int>(pilots_.size());
    if (n_dev_ < 1) throw ConfigError("PilotEstimator: no pilots");
    const int plen = static_cast<int>(pilots_[0].size());
    for (const cvec& p : pilots_)
        if (static_cast<int>(p.size()) != plen)
            throw ConfigError("PilotEstimator: pilot length mismatch");
    if (plen < n_taps_) throw ConfigError("PilotEstimator: pilot_len >= n_taps required");
    // orthogonality gate
    for (int a = 0; a < n_dev_; ++a)
        for (int b = a + 1; b < n_dev_; ++b) {
            cplx dot(0.0, 0.0);
            for (int i = 0; i < plen; ++i) dot += pilots_[a][i] * std::conj(pilots_[b][i]);
            if (std::abs(dot) > 1e-6 * plen)
                throw ConfigError("PilotEstimator: pilot sequences are not orthogonal");
        }
    obs_len_ = plen + n_taps_ - 1;

    const int nu = n_dev_ * n_taps_;  // unknowns
    if (obs_len_ < nu)
        throw ConfigError("PilotEstimator: pilots too short to identify all taps");

    // Gram of the stacked convolution matrices: G[(d,k),(d',k')] =
    // sum_j conj(p_d[j-k]) p_d'[j-k']
    std::vector<cvec> g(nu, cvec(nu, cplx(0.0, 0.0)));
    for (int d1 = 0; d1 < n_dev_; ++d1)
        for (int k1 = 0; k1 < n_taps_; ++k1)
            for (int d2 = 0; d2 < n_dev_; ++d2)
                for (int k2 = 0; k2 < n_taps_; ++k2) {
                    cplx acc(0.0, 0.0);
                    for (int j = 0; j < obs_len_; ++j) {
                        const int i1 = j - k1, i2 = j - k2;
                        if (i1 < 0 || i1 >= plen || i2 < 0 || i2 >= plen) continue;
                        acc += std::conj(pilots_[d1][i1]) * pilots_[d2][i2];
                    }
                    g[d1 * n_taps_ + k1][d2 * n_taps_ + k2] = acc;
                }
    if (kind == Estimator::mmse) {
        if (static_cast<int>(prior_tap_power.size()) != nu)
            throw ConfigError("PilotEstimator: mmse needs a prior per device tap");
        for (int i = 0; i < nu; ++i) {
            const double c = prior_tap_power[i];
            g[i][i] += (c > 0.0) ? noise_power / c : 1e30;
        }
    } else {
        // tiny ridge keeps the factorization stable for marginal pilot sets
        for (int i = 0; i < nu; ++i) g[i][i] += 1e-12 * g[i][i].real() + 1e-300;
    }
    chol_ = cholesky(g);
}

std::vector<cvec> PilotEstimator::estimate(const cvec& obs) const {
    if (static_cast<int>(obs.size()) != obs_len_)
        throw std::invalid_argument("PilotEstimator: observation length mismatch");
    const int plen = static_cast<int>(pilots_[0].size());
    const int nu = n_dev_ * n_taps_;
    cvec rhs(nu, cplx(0.0, 0.0));
    for (int d = 0; d < n_dev_; ++d)
        for (int k = 0; k < n_taps_; ++k) {
            cplx acc(0.0, 0.0);
            for (int i = 0; i < plen; ++i) acc += std::conj(pilots_[d][i]) * obs[i + k];
            rhs[d * n_taps_ + k] = acc;
        }
    const cvec h = chol_solve(chol_, std::move(rhs));
    std::vector<cvec> out(n_dev_, cvec(n_taps_));
    for (int d = 0; d < n_dev_; ++d)
        for (int k = 0; k < n_taps_; ++k) out[d][k] = h[d * n_taps_ + k];
    return out;
}

namespace {

void dft(const cvec& in, cvec& out, bool inverse) {
    const int n = static_cast<int>(in.size());
    out.assign(n, cplx(0.0, 0.0));
    const double sign = inverse ? 1.0 : -1.0;
    for (int k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (int i = 0; i < n; ++i)
            acc += in[i] * std::polar(1.0, sign * 2.0 * M_PI * k * i / n);
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
}

}  // namespace

std::pair<cvec, bool> zf_equalize(const cvec& block_obs, const cvec& taps, double eps_rel) {
    const int n = static_cast<int>(block_obs.size());
    cvec h_pad(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < taps.size() && k < static_cast<std::size_t>(n); ++k)
        h_pad[k] = taps[k];
    cvec yf, hf;
    dft(block_obs, yf, false);
    dft(h_pad, hf, false);
    double mean_p = 0.0, min_p = std::numeric_limits<double>::infinity();
    for (const cplx& v : hf) {
        const double p = std::norm(v);
        mean_p += p;
        min_p = std::min(min_p, p);
    }
    mean_p /= n;
    const double eps = eps_rel * mean_p;
    const bool null_flag = min_p < eps || mean_p == 0.0;
    cvec xf(n);
    for (int k = 0; k < n; ++k) xf[k] = yf[k] * std::conj(hf[k]) / (std::norm(hf[k]) + eps);
    cvec x;
    dft(xf, x, true);
    return {std::move(x), null_flag};
}

namespace {

// spread hypothesis w = v (.) tone rotation, sampled over t entries
cvec hypothesis_waveform(const DispersionVector& v, int tone, int t) {
    cvec w(t);
    for (int i = 0; i < t; ++i) w[i] = v[i] * std::polar(1.0, 2.0 * M_PI * tone * i / t);
    return w;
}

struct MlWork {
    cvec u;                 // sum over antennas of tap-matched correlations
    std::vector<cplx> rlag; // summed tap autocorrelation by lag
    double c0 = 0.0;        // sum ||obs||^2
    int t = 0;
    int k = 0;
};

MlWork ml_prepare(const DecodeProblem& p) {
    MlWork w;
    w.t = p.t;
    w.k = static_cast<int>((*p.taps_est)[0].size());
    w.u.assign(p.t, cplx(0.0, 0.0));
    w.rlag.assign(w.k, cplx(0.0, 0.0));
    for (std::size_t ant = 0; ant < p.obs->size(); ++ant) {
        const cvec& y = (*p.obs)[ant];
        const cvec& h = (*p.taps_est)[ant];
        for (const cplx& v : y) w.c0 += std::norm(v);
        for (int i = 0; i < p.t; ++i) {
            cplx acc(0.0, 0.0);
            for (int k = 0; k < w.k; ++k)
                if (i + k < static_cast<int>(y.size())) acc += std::conj(h[k]) * y[i + k];
            w.u[i] = w.u[i] + acc;
        }
        for (int d = 0; d < w.k; ++d) {
            cplx acc(0.0, 0.0);
            for (int k = 0; k + d < w.k; ++k) acc += std::conj(h[k]) * h[k + d];
            w.rlag[d] += acc;
        }
    }
    return w;
}

// cost = c0 - 2 Re(conj(s) a) + |s|^2 b with a = w^H u, b = w^H R w
void ml_terms(const MlWork& mw, const cvec& w, cplx& a, double& b) {
    a = cplx(0.0, 0.0);
    for (int i = 0; i < mw.t; ++i) a += std::conj(w[i]) * mw.u[i];
    double b0 = mw.rlag[0].real();
    double norm2 = 0.0;
    cplx cross(0.0, 0.0);
    for (int i = 0; i < mw.t; ++i) norm2 += std::norm(w[i]);
    b = b0 * norm2;
    for (int d = 1; d < mw.k; ++d) {
        cross = cplx(0.0, 0.0);
        for (int i = 0; i + d < mw.t; ++i) cross += std::conj(w[i]) * w[i + d];
        b += 2.0 * (mw.rlag[d] * cross).real();
    }
}

const cvec kUnitSymbol = {cplx(1.0, 0.0)};

const cvec& coherent_points(const DecodeProblem& p) {
    if (p.constellation == nullptr || p.constellation->kind == ModKind::fsk)
        return kUnitSymbol;
    return p.constellation->points;
}

}  // namespace

Decision ml_decode(const DecodeProblem& p) {
    const MlWork mw = ml_prepare(p);
    const cvec& pts = coherent_points(p);
    Decision best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int q = 0; q < p.codebook->q(); ++q) {
        for (int tone = 0; tone < p.n_tones; ++tone) {
            const cvec w = hypothesis_waveform(p.codebook->vectors[q], tone, p.t);
            cplx a;
            double b;
            ml_terms(mw, w, a, b);
            for (std::size_t s = 0; s < pts.size(); ++s) {
                const double cost =
                    mw.c0 - 2.0 * (std::conj(pts[s]) * a).real() + std::norm(pts[s]) * b;
                if (cost < best_cost - 1e-15) {
                    best_cost = cost;
                    best = Decision{q, tone, static_cast<int>(s), cost};
                }
            }
        }
    }
    best.cost = best_cost;
    return best;
}

double hypothesis_cost(const DecodeProblem& p, int vector_index, int tone, int symbol_index) {
    const MlWork mw = ml_prepare(p);
    const cvec& pts = coherent_points(p);
    const cvec w = hypothesis_waveform(p.codebook->vectors[vector_index], tone, p.t);
    cplx a;
    double b;
    ml_terms(mw, w, a, b);
    const cplx s = pts[symbol_index];
    return mw.c0 - 2.0 * (std::conj(s) * a).real() + std::norm(s) * b;
}

namespace {

Decision slice_decode(const DecodeProblem& p, const cvec& combined) {
    // matched correlation over (vector, tone), then nearest-point slicing
    const cvec& pts = coherent_points(p);
    Decision best;
    double best_metric = -std::numeric_limits<double>::infinity();
    for (int q = 0; q < p.codebook->q(); ++q)
        for (int tone = 0; tone < p.n_tones; ++tone) {
            const cvec w = hypothesis_waveform(p.codebook->vectors[q], tone, p.t);
            cplx corr(0.0, 0.0);
            double wn = 0.0;
            for (int i = 0; i < p.t; ++i) {
                corr += std::conj(w[i]) * combined[i];
                wn += std::norm(w[i]);
            }
            const double metric = std::norm(corr) / std::max(wn, 1e-300);
            if (metric > best_metric + 1e-15) {
                best_metric = metric;
                best.vector_index = q;
                best.tone = tone;
                // projection coefficient onto the chosen waveform
                const cplx proj = corr / std::max(wn, 1e-300);
                int s_best = 0;
                double d_best = std::numeric_limits<double>::infinity();
                for (std::size_t s = 0; s < pts.size(); ++s) {
                    const double d = std::norm(proj - pts[s]);
                    if (d < d_best - 1e-15) {
                        d_best = d;
                        s_best = static_cast<int>(s);
                    }
                }
                best.symbol_index = s_best;
                best.cost = -metric;
            }
        }
    return best;
}

Decision equalize_and_slice(const DecodeProblem& p, double noise_reg) {
    // per-antenna deconvolution, then estimate-weighted combining
    const std::size_t n_ant = p.obs->size();
    cvec combined(p.t, cplx(0.0, 0.0));
    double wsum = 0.0;
    for (std::size_t ant = 0; ant < n_ant; ++ant) {
        const cvec& h = (*p.taps_est)[ant];
        auto [eq, flag] = zf_equalize((*p.obs)[ant], h, noise_reg > 0.0 ? noise_reg : 1e-8);
        (void)flag;
        double hp = 0.0;
        for (const cplx& v : h) hp += std::norm(v);
        for (int i = 0; i < p.t; ++i) combined[i] += hp * eq[i];
        wsum += hp;
    }
    if (wsum > 0.0)
        for (cplx& v : combined) v /= wsum;
    return slice_decode(p, combined);
}

}  // namespace

Decision zf_decode(const DecodeProblem& p) { return equalize_and_slice(p, 0.0); }

Decision mmse_decode(const DecodeProblem& p) {
    // regularize the deconvolution at the noise level instead of epsilon
    double sig = 0.0;
    for (const cvec& h : *p.taps_est)
        for (const cplx& v : h) sig += std::norm(v);
    sig /= std::max<std::size_t>(1, p.taps_est->size());
    const double rel = (sig > 0.0) ? p.noise_power / sig : 1e-8;
    return equalize_and_slice(p, std::max(rel, 1e-12));
}

Decision mf_decode(const DecodeProblem& p) {
    // matched filter: tap-matched correlation without deconvolution
    const std::size_t n_ant = p.obs->size();
    cvec combined(p.t, cplx(0.0, 0.0));
    double wsum = 0.0;
    for (std::size_t ant = 0; ant < n_ant; ++ant) {
        const cvec& y = (*p.obs)[ant];
        const cvec& h = (*p.taps_est)[ant];
        double hp = 0.0;
        for (const cplx& v : h) hp += std::norm(v);
        for (int i = 0; i < p.t; ++i) {
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k < h.size(); ++k)
                if (i + k < y.size()) acc += std::conj(h[k]) * y[i + k];
            combined[i] += acc;
        }
        wsum += hp;
    }
    if (wsum > 0.0)
        for (cplx& v : combined) v /= wsum;
    return slice_decode(p, combined);
}

Decision decode(DecoderKind kind, const DecodeProblem& p) {
    switch (kind) {
        case DecoderKind::ml: return ml_decode(p);
        case DecoderKind::zf: return zf_decode(p);
        case DecoderKind::mmse: return mmse_decode(p);
        case DecoderKind::mf: return mf_decode(p);
    }
    throw std::invalid_argument("decode: unknown decoder");
}

std::pair<int, int> square_law_bank(const std::vector<cvec>& eq_obs, const Codebook& cb,
                                    int n_tones, int t) {
    int best_q = 0, best_tone = 0;
    double best_e = -1.0;
    for (int q = 0; q < cb.q(); ++q)
        for (int tone = 0; tone < n_tones; ++tone) {
            const cvec w = hypothesis_waveform(cb.vectors[q], tone, t);
            double wn = 0.0;
            for (const cplx& v : w) wn += std::norm(v);
            double e = 0.0;
            for (const cvec& y : eq_obs) {
                cplx corr(0.0, 0.0);
                for (int i = 0; i < t; ++i) corr += std::conj(w[i]) * y[i];
                e += std::norm(corr) / std::max(wn, 1e-300);
            }
            if (e > best_e + 1e-15) {
                best_e = e;
                best_q = q;
                best_tone = tone;
            }
        }
    return {best_q, best_tone};
}

}  // namespace stfs
