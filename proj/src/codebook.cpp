#include "stfspread/codebook.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace stfs {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

const char* construction_name(CodebookConstruction c) {
    return c == CodebookConstruction::random_gaussian ? "random_gaussian" : "unitary";
}

const char* criterion_name(CodebookCriterion c) {
    switch (c) {
        case CodebookCriterion::max_min_distance: return "max_min_distance";
        case CodebookCriterion::min_error_prob: return "min_error_prob";
        case CodebookCriterion::max_capacity: return "max_capacity";
    }
    return "max_min_distance";
}

CodebookConstruction construction_from_name(const std::string& s) {
    if (s == "random_gaussian") return CodebookConstruction::random_gaussian;
    if (s == "unitary") return CodebookConstruction::unitary;
    throw IoError("codebook: unknown construction '" + s + "'");
}

CodebookCriterion criterion_from_name(const std::string& s) {
    if (s == "max_min_distance") return CodebookCriterion::max_min_distance;
    if (s == "min_error_prob") return CodebookCriterion::min_error_prob;
    if (s == "max_capacity") return CodebookCriterion::max_capacity;
    throw IoError("codebook: unknown criterion '" + s + "'");
}

}  // namespace

void renormalize_power(DispersionVector& v) {
    double p = 0.0;
    for (const cplx& x : v) p += std::norm(x);
    if (p <= 0.0) return;  // degenerate all-zero vector stays zero
    const double s = std::sqrt(static_cast<double>(v.size()) / p);
    for (cplx& x : v) x *= s;
}

Codebook gen_random_codebook(int q, int t, Rng& rng) {
    if (q < 1 || t < 1) throw ConfigError("gen_random_codebook: require q >= 1, t >= 1");
    Codebook cb;
    cb.construction = CodebookConstruction::random_gaussian;
    cb.vectors.reserve(q);
    for (int i = 0; i < q; ++i) {
        DispersionVector v(t, cplx(0.0, 0.0));
        const int pos = static_cast<int>(rng.uniform_index(t));
        const cplx g = rng.cnormal();
        const double phase = std::arg(g);
        v[pos] = std::polar(std::sqrt(static_cast<double>(t)), phase);
        renormalize_power(v);
        cb.vectors.push_back(std::move(v));
    }
    return cb;
}

Codebook gen_unitary_codebook(int m, int t) {
    if (m < 1 || t < 1) throw ConfigError("gen_unitary_codebook: require m >= 1, t >= 1");
    const int n = std::max(m, t);  // source DFT dimension
    Codebook cb;
    cb.construction = CodebookConstruction::unitary;
    cb.vectors.reserve(m);
    const double scale = std::sqrt(static_cast<double>(t) / m) / std::sqrt(static_cast<double>(n));
    for (int col = 0; col < m; ++col) {
        DispersionVector v(t);
        for (int row = 0; row < t; ++row) {
            const double angle = -2.0 * M_PI * row * col / n;
            v[row] = std::polar(scale, angle);
        }
        renormalize_power(v);
        cb.vectors.push_back(std::move(v));
    }
    return cb;
}

namespace {

// Spread-signal distance between hypotheses (s, v) and (s', v').
double pair_distance(const cplx& s1, const DispersionVector& v1, const cplx& s2,
                     const DispersionVector& v2) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < v1.size(); ++i) d2 += std::norm(s1 * v1[i] - s2 * v2[i]);
    return std::sqrt(d2);
}

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

double score_codebook(const Codebook& cb, const OptimizeOptions& opt) {
    const cvec& pts = opt.constellation.points;
    if (pts.empty()) throw ConfigError("score_codebook: constellation has no points");
    const int q = cb.q();
    const int s_count = static_cast<int>(pts.size());

    switch (opt.criterion) {
        case CodebookCriterion::max_min_distance: {
            double dmin = std::numeric_limits<double>::infinity();
            for (int a = 0; a < q; ++a)
                for (int sa = 0; sa < s_count; ++sa)
                    for (int b = a; b < q; ++b)
                        for (int sb = (b == a ? sa + 1 : 0); sb < s_count; ++sb)
                            dmin = std::min(dmin, pair_distance(pts[sa], cb.vectors[a],
                                                                pts[sb], cb.vectors[b]));
            return dmin;
        }
        case CodebookCriterion::min_error_prob: {
            // negative pairwise union bound at the configured SNR
            const double gamma = linear_from_db(opt.snr_db);
            double bound = 0.0;
            for (int a = 0; a < q; ++a)
                for (int sa = 0; sa < s_count; ++sa)
                    for (int b = a; b < q; ++b)
                        for (int sb = (b == a ? sa + 1 : 0); sb < s_count; ++sb) {
                            const double d = pair_distance(pts[sa], cb.vectors[a],
                                                           pts[sb], cb.vectors[b]);
                            bound += qfunc(d * std::sqrt(gamma / 2.0));
                        }
            return -bound;
        }
        case CodebookCriterion::max_capacity: {
            // log-det mutual-information proxy: log2 det(I + gamma/q V V^H)
            const double gamma = linear_from_db(opt.snr_db);
            const int t = cb.t();
            std::vector<cvec> a(t, cvec(t, cplx(0.0, 0.0)));
            for (int i = 0; i < t; ++i) {
                a[i][i] = 1.0;
                for (int j = 0; j < t; ++j) {
                    cplx acc(0.0, 0.0);
                    for (int k = 0; k < q; ++k)
                        acc += cb.vectors[k][i] * std::conj(cb.vectors[k][j]);
                    a[i][j] += gamma / q * acc;
                }
            }
            // log|det| via Gaussian elimination with partial pivoting
            double logdet = 0.0;
            for (int col = 0; col < t; ++col) {
                int piv = col;
                for (int r = col + 1; r < t; ++r)
                    if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
                if (std::abs(a[piv][col]) == 0.0) return -std::numeric_limits<double>::infinity();
                std::swap(a[piv], a[col]);
                logdet += std::log2(std::abs(a[col][col]));
                for (int r = col + 1; r < t; ++r) {
                    const cplx f = a[r][col] / a[col][col];
                    for (int cc = col; cc < t; ++cc) a[r][cc] -= f * a[col][cc];
                }
            }
            return logdet;
        }
    }
    throw ConfigError("score_codebook: unknown criterion");
}

Codebook optimize_codebook(const std::function<Codebook(Rng&)>& generator,
                           const OptimizeOptions& opt, std::uint64_t seed) {
    if (opt.budget < 1) throw ConfigError("optimize_codebook: budget must be >= 1");
    Codebook best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < opt.budget; ++i) {
        Rng rng = Rng::stream(seed, tag(StreamTag::codebook), static_cast<std::uint64_t>(i));
        Codebook cand = generator(rng);
        const double s = score_codebook(cand, opt);
        if (s > best_score) {
            best_score = s;
            best = std::move(cand);
        }
    }
    best.criterion = opt.criterion;
    best.seed = seed;
    return best;
}

void save_codebook(const Codebook& cb, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("codebook: cannot write '" + path + "'");
    out << "q " << cb.q() << "\n";
    out << "t " << cb.t() << "\n";
    out << "construction " << construction_name(cb.construction) << "\n";
    out << "criterion " << criterion_name(cb.criterion) << "\n";
    out << "seed " << cb.seed << "\n";
    for (const DispersionVector& v : cb.vectors) {
        out << "v";
        for (const cplx& x : v) out << " " << fmt_double(x.real()) << " " << fmt_double(x.imag());
        out << "\n";
    }
    if (!out) throw IoError("codebook: write failed for '" + path + "'");
}

Codebook load_codebook(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("codebook: cannot read '" + path + "'");
    Codebook cb;
    int q = 0, t = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "q") ls >> q;
        else if (key == "t") ls >> t;
        else if (key == "construction") {
            std::string v;
            ls >> v;
            cb.construction = construction_from_name(v);
        } else if (key == "criterion") {
            std::string v;
            ls >> v;
            cb.criterion = criterion_from_name(v);
        } else if (key == "seed") ls >> cb.seed;
        else if (key == "v") {
            DispersionVector v;
            double re, im;
            while (ls >> re >> im) v.emplace_back(re, im);
            cb.vectors.push_back(std::move(v));
        } else {
            throw IoError("codebook: unknown line '" + key + "' in '" + path + "'");
        }
    }
    if (cb.q() != q || (q > 0 && cb.t() != t))
        throw IoError("codebook: header does not match rows in '" + path + "'");
    for (const DispersionVector& v : cb.vectors) {
        double p = 0.0;
        for (const cplx& x : v) p += std::norm(x);
        if (std::abs(p - static_cast<double>(v.size())) > 1e-6 * v.size())
            throw IoError("codebook: power constraint violated in '" + path + "'");
    }
    return cb;
}

}  // namespace stfs
