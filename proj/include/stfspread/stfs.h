/* C interface to the spreading simulator. All objects are opaque handles;
 * every call returns a status code and the per-thread message from
 * stfs_last_error() describes the most recent failure. */
#ifndef STFSPREAD_STFS_H
#define STFSPREAD_STFS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stfs_status {
    STFS_OK = 0,
    STFS_ERR_CONFIG = 2, /* invalid configuration or argument */
    STFS_ERR_IO = 3,     /* file could not be read or written */
    STFS_ERR_INTERNAL = 5
} stfs_status;

typedef struct stfs_config stfs_config;
typedef struct stfs_result stfs_result;
typedef struct stfs_codebook stfs_codebook;

const char* stfs_version(void);
const char* stfs_last_error(void);

/* configuration ---------------------------------------------------------- */

stfs_status stfs_config_create(stfs_config** out);
stfs_status stfs_config_load(const char* path, stfs_config** out);
stfs_status stfs_config_preset(const char* name, stfs_config** out);
/* overlay key = value lines from a file onto an existing config */
stfs_status stfs_config_apply_file(stfs_config* cfg, const char* path);
stfs_status stfs_config_set(stfs_config* cfg, const char* key, const char* value);
stfs_status stfs_config_validate(const stfs_config* cfg);
/* serialized key = value text; returns required length via *len when buf is
 * NULL */
stfs_status stfs_config_text(const stfs_config* cfg, char* buf, size_t* len);
void stfs_config_free(stfs_config* cfg);

/* experiments ------------------------------------------------------------ */

stfs_status stfs_run(const stfs_config* cfg, int workers, stfs_result** out);
size_t stfs_result_rows(const stfs_result* res);
stfs_status stfs_result_row(const stfs_result* res, size_t index, double* sweep_value,
                            char* metric_buf, size_t metric_buflen, double* estimate,
                            double* ci_lo, double* ci_hi, long* n, uint64_t* seed);
/* format: "csv" | "json" | "plotdata" */
stfs_status stfs_result_emit(const stfs_result* res, const char* format, const char* path);
stfs_status stfs_result_csv(const stfs_result* res, char* buf, size_t* len);
void stfs_result_free(stfs_result* res);

/* codebooks --------------------------------------------------------------- */

stfs_status stfs_codebook_random(uint32_t q, uint32_t t, uint64_t seed, stfs_codebook** out);
stfs_status stfs_codebook_unitary(uint32_t m, uint32_t t, stfs_codebook** out);
/* construction: "random_gaussian" | "unitary";
 * criterion: "max_min_distance" | "min_error_prob" | "max_capacity";
 * modulation: "bpsk" | "qpsk" | "qam16" */
stfs_status stfs_codebook_optimize(const char* construction, uint32_t q, uint32_t t,
                                   const char* criterion, int budget, const char* modulation,
                                   double snr_db, uint64_t seed, stfs_codebook** out);
stfs_status stfs_codebook_save(const stfs_codebook* cb, const char* path);
stfs_status stfs_codebook_load(const char* path, stfs_codebook** out);
uint32_t stfs_codebook_q(const stfs_codebook* cb);
uint32_t stfs_codebook_t(const stfs_codebook* cb);
stfs_status stfs_codebook_entry(const stfs_codebook* cb, uint32_t vector_index,
                                uint32_t component, double* re, double* im);
void stfs_codebook_free(stfs_codebook* cb);

#ifdef __cplusplus
}
#endif

#endif /* STFSPREAD_STFS_H */
