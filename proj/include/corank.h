/* C interface of the corank shared library.
 *
 * Conventions:
 *   - every function returns a corank_status; results come back through
 *     out-parameters
 *   - strings produced by the library are heap-allocated and must be
 *     released with corank_string_free
 *   - matrices are opaque handles released with corank_matrix_free
 *   - on failure corank_last_error() describes the problem for the calling
 *     thread
 */
#ifndef CORANK_H
#define CORANK_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum corank_status {
    CORANK_OK = 0,
    CORANK_ERR_USAGE = 2,    /* bad arguments, unknown rule or family */
    CORANK_ERR_BUDGET = 3,   /* enumeration budget exceeded */
    CORANK_ERR_INTERNAL = 4  /* invariant failure inside the library */
} corank_status;

typedef enum corank_format {
    CORANK_FORMAT_JSON = 0,
    CORANK_FORMAT_CSV = 1
} corank_format;

const char* corank_version(void);
const char* corank_last_error(void);  /* thread-local; empty when no error */
void corank_string_free(char* s);

uint64_t corank_default_budget(void);  /* honors the CORANK_BUDGET variable */

/* ---- exact linear algebra over F2 (opaque handles) ---- */

typedef struct corank_matrix corank_matrix;

corank_status corank_matrix_new(uint32_t n, corank_matrix** out);
corank_status corank_matrix_parse(const char* rows, corank_matrix** out);  /* "01;10" */
void corank_matrix_free(corank_matrix* m);

corank_status corank_matrix_set(corank_matrix* m, uint32_t i, uint32_t j, int bit);
corank_status corank_matrix_get(const corank_matrix* m, uint32_t i, uint32_t j, int* bit);
corank_status corank_matrix_rank(const corank_matrix* m, uint32_t* rank, uint32_t* corank);

/* v, w are 0/1 strings of length n; the extension appends row v, column w
 * and corner c */
corank_status corank_matrix_extend(const corank_matrix* m, const char* v, const char* w, int c,
                                   corank_matrix** out);
/* klass: -1 corank drops, 0 stays, +1 grows */
corank_status corank_matrix_classify(const corank_matrix* m, const char* v, const char* w, int c,
                                     int* klass);
corank_status corank_matrix_in_image(const corank_matrix* m, const char* v, int* in_image);
corank_status corank_matrix_pairing(const corank_matrix* m, const char* v, const char* w, int* bit);

/* ---- scalar helpers ---- */

corank_status corank_pi_value(uint32_t j, double* out);
corank_status corank_qcl_entry_str(uint32_t i, int64_t j, char** dyadic);

/* ---- report payloads (JSON or CSV), one per CLI subcommand ----
 * Every function writes a heap string to *out. A seed parameter is consumed
 * exactly as given; reruns with identical arguments produce identical
 * bytes. */

corank_status corank_report_pi(uint32_t max_j, double precision, corank_format f, char** out);
corank_status corank_report_qcl(uint32_t n, corank_format f, char** out);
corank_status corank_report_stationarity(uint32_t n, double precision, corank_format f, char** out);
corank_status corank_report_drift(uint32_t xmin, uint32_t xmax, corank_format f, char** out);
corank_status corank_report_exact(const char* rule, uint32_t r, uint64_t budget,
                                  corank_format f, char** out);
corank_status corank_report_mc(const char* rule, uint32_t r, uint64_t samples, uint64_t seed,
                               uint32_t threads, corank_format f, char** out);
/* mode: "exact", "mc" or "auto" */
corank_status corank_report_mixture(const char* family, uint32_t r, const char* mode,
                                    uint64_t samples, uint64_t seed, uint64_t budget,
                                    uint32_t threads, corank_format f, char** out);
corank_status corank_report_audit(const char* rule, uint32_t r, int exact_mode, uint64_t samples,
                                  uint64_t seed, uint64_t budget, corank_format f, char** out);
corank_status corank_report_decomp(const char* rule, uint32_t rmax, uint64_t budget,
                                   corank_format f, char** out);
corank_status corank_report_converge(const char* family, const uint32_t* rs, uint32_t n_rs,
                                     uint64_t samples, uint64_t seed, uint64_t budget,
                                     uint32_t threads, corank_format f, char** out);
corank_status corank_report_hoeffding(uint32_t r, double eps, corank_format f, char** out);
/* a, b are only read when j == 3 */
corank_status corank_report_pellcheck(uint32_t j, uint32_t s, uint32_t kappa, int a, int b,
                                      uint64_t budget, corank_format f, char** out);
corank_status corank_report_redei(int64_t d, int64_t l, corank_format f, char** out);
corank_status corank_report_scan(int64_t dmax, int64_t l, corank_format f, char** out);

/* wraps a payload in the reproducibility envelope; pass has_seed = 0 for
 * commands without randomness and timestamp = NULL or "" for deterministic
 * output */
corank_status corank_envelope(const char* command, int has_seed, uint64_t seed,
                              const char* timestamp, const char* payload, corank_format f,
                              char** out);

#ifdef __cplusplus
}
#endif

#endif /* CORANK_H */
