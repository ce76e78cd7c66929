#include "stfspread/stfs.h"

#include <cstring>
#include <string>

#include "stfspread/codebook.hpp"
#include "stfspread/config.hpp"
#include "stfspread/engine.hpp"

struct stfs_config {
    stfs::SystemConfig rep;
};
struct stfs_result {
    stfs::ResultTable rep;
};
struct stfs_codebook {
    stfs::Codebook rep;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
stfs_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const stfs::ConfigError& e) {
        set_error(e.what());
        return STFS_ERR_CONFIG;
    } catch (const stfs::IoError& e) {
        set_error(e.what());
        return STFS_ERR_IO;
    } catch (const std::exception& e) {
        set_error(e.what());
        return STFS_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return STFS_ERR_INTERNAL;
    }
}

stfs_status copy_out(const std::string& s, char* buf, size_t* len) {
    if (len == nullptr) {
        set_error("length pointer is null");
        return STFS_ERR_CONFIG;
    }
    if (buf == nullptr) {
        *len = s.size() + 1;
        return STFS_OK;
    }
    if (*len < s.size() + 1) {
        set_error("buffer too small");
        return STFS_ERR_CONFIG;
    }
    std::memcpy(buf, s.data(), s.size());
    buf[s.size()] = '\0';
    *len = s.size() + 1;
    return STFS_OK;
}

stfs::Constellation constellation_from_name(const std::string& name) {
    if (name == "bpsk") return stfs::make_psk(2);
    if (name == "qpsk") return stfs::make_psk(4);
    if (name == "qam16") return stfs::make_qam(16);
    throw stfs::ConfigError("unknown modulation '" + name + "'");
}

}  // namespace

extern "C" {

const char* stfs_version(void) { return "0.1.0"; }

const char* stfs_last_error(void) { return g_last_error.c_str(); }

stfs_status stfs_config_create(stfs_config** out) {
    return guarded([&] {
        *out = new stfs_config{};
        return STFS_OK;
    });
}

stfs_status stfs_config_load(const char* path, stfs_config** out) {
    return guarded([&] {
        *out = new stfs_config{stfs::SystemConfig::from_file(path)};
        return STFS_OK;
    });
}

stfs_status stfs_config_preset(const char* name, stfs_config** out) {
    return guarded([&] {
        *out = new stfs_config{stfs::preset(name)};
        return STFS_OK;
    });
}

stfs_status stfs_config_apply_file(stfs_config* cfg, const char* path) {
    return guarded([&] {
        stfs::SystemConfig merged = cfg->rep;
        merged.apply_file(path);  // file lines override preset values
        cfg->rep = merged;
        return STFS_OK;
    });
}

stfs_status stfs_config_set(stfs_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        cfg->rep.apply_line(key, value);
        return STFS_OK;
    });
}

stfs_status stfs_config_validate(const stfs_config* cfg) {
    return guarded([&] {
        cfg->rep.validate();
        return STFS_OK;
    });
}

stfs_status stfs_config_text(const stfs_config* cfg, char* buf, size_t* len) {
    return guarded([&] { return copy_out(cfg->rep.to_text(), buf, len); });
}

void stfs_config_free(stfs_config* cfg) { delete cfg; }

stfs_status stfs_run(const stfs_config* cfg, int workers, stfs_result** out) {
    return guarded([&] {
        *out = new stfs_result{stfs::run_experiment(cfg->rep, workers)};
        return STFS_OK;
    });
}

size_t stfs_result_rows(const stfs_result* res) { return res ? res->rep.rows.size() : 0; }

stfs_status stfs_result_row(const stfs_result* res, size_t index, double* sweep_value,
                            char* metric_buf, size_t metric_buflen, double* estimate,
                            double* ci_lo, double* ci_hi, long* n, uint64_t* seed) {
    return guarded([&] {
        if (res == nullptr || index >= res->rep.rows.size())
            throw stfs::ConfigError("result row index out of range");
        const stfs::ResultRow& r = res->rep.rows[index];
        if (sweep_value) *sweep_value = r.sweep_value;
        if (metric_buf != nullptr) {
            if (metric_buflen < r.metric.size() + 1)
                throw stfs::ConfigError("metric buffer too small");
            std::memcpy(metric_buf, r.metric.data(), r.metric.size());
            metric_buf[r.metric.size()] = '\0';
        }
        if (estimate) *estimate = r.estimate;
        if (ci_lo) *ci_lo = r.ci_lo;
        if (ci_hi) *ci_hi = r.ci_hi;
        if (n) *n = r.n;
        if (seed) *seed = r.seed;
        return STFS_OK;
    });
}

stfs_status stfs_result_emit(const stfs_result* res, const char* format, const char* path) {
    return guarded([&] {
        stfs::emit_results(res->rep, format, path);
        return STFS_OK;
    });
}

stfs_status stfs_result_csv(const stfs_result* res, char* buf, size_t* len) {
    return guarded([&] { return copy_out(stfs::to_csv(res->rep), buf, len); });
}

void stfs_result_free(stfs_result* res) { delete res; }

stfs_status stfs_codebook_random(uint32_t q, uint32_t t, uint64_t seed, stfs_codebook** out) {
    return guarded([&] {
        stfs::Rng rng = stfs::Rng::stream(seed, stfs::tag(stfs::StreamTag::codebook), 0);
        auto cb = stfs::gen_random_codebook(static_cast<int>(q), static_cast<int>(t), rng);
        cb.seed = seed;
        *out = new stfs_codebook{std::move(cb)};
        return STFS_OK;
    });
}

stfs_status stfs_codebook_unitary(uint32_t m, uint32_t t, stfs_codebook** out) {
    return guarded([&] {
        *out = new stfs_codebook{
            stfs::gen_unitary_codebook(static_cast<int>(m), static_cast<int>(t))};
        return STFS_OK;
    });
}

stfs_status stfs_codebook_optimize(const char* construction, uint32_t q, uint32_t t,
                                   const char* criterion, int budget, const char* modulation,
                                   double snr_db, uint64_t seed, stfs_codebook** out) {
    return guarded([&] {
        const std::string cons = construction;
        auto gen = [&](stfs::Rng& rng) {
            if (cons == "unitary")
                return stfs::gen_unitary_codebook(static_cast<int>(q), static_cast<int>(t));
            if (cons == "random_gaussian")
                return stfs::gen_random_codebook(static_cast<int>(q), static_cast<int>(t), rng);
            throw stfs::ConfigError("unknown construction '" + cons + "'");
        };
        stfs::OptimizeOptions opt;
        const std::string crit = criterion;
        if (crit == "max_min_distance") opt.criterion = stfs::CodebookCriterion::max_min_distance;
        else if (crit == "min_error_prob") opt.criterion = stfs::CodebookCriterion::min_error_prob;
        else if (crit == "max_capacity") opt.criterion = stfs::CodebookCriterion::max_capacity;
        else throw stfs::ConfigError("unknown criterion '" + crit + "'");
        opt.budget = budget;
        opt.constellation = constellation_from_name(modulation);
        opt.snr_db = snr_db;
        *out = new stfs_codebook{stfs::optimize_codebook(gen, opt, seed)};
        return STFS_OK;
    });
}

stfs_status stfs_codebook_save(const stfs_codebook* cb, const char* path) {
    return guarded([&] {
        stfs::save_codebook(cb->rep, path);
        return STFS_OK;
    });
}

stfs_status stfs_codebook_load(const char* path, stfs_codebook** out) {
    return guarded([&] {
        *out = new stfs_codebook{stfs::load_codebook(path)};
        return STFS_OK;
    });
}

uint32_t stfs_codebook_q(const stfs_codebook* cb) {
    return cb ? static_cast<uint32_t>(cb->rep.q()) : 0;
}

uint32_t stfs_codebook_t(const stfs_codebook* cb) {
    return cb ? static_cast<uint32_t>(cb->rep.t()) : 0;
}

stfs_status stfs_codebook_entry(const stfs_codebook* cb, uint32_t vector_index,
                                uint32_t component, double* re, double* im) {
    return guarded([&] {
        if (cb == nullptr || vector_index >= static_cast<uint32_t>(cb->rep.q()) ||
            component >= static_cast<uint32_t>(cb->rep.t()))
            throw stfs::ConfigError("codebook entry index out of range");
        const stfs::cplx v = cb->rep.vectors[vector_index][component];
        if (re) *re = v.real();
        if (im) *im = v.imag();
        return STFS_OK;
    });
}

void stfs_codebook_free(stfs_codebook* cb) { delete cb; }

}  // extern "C"
