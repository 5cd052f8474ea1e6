/* C interface to the normalized-solution laboratory.
 *
 * All entry points return an nnls_status code; on failure a thread-local
 * message is available through nnls_last_error().  Strings handed out through
 * char** parameters are heap-allocated and must be released with
 * nnls_string_free().  The constants table is an opaque handle.
 */
#ifndef NNLS_H
#define NNLS_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nnls_status {
  NNLS_OK = 0,
  NNLS_SOFT_CHECK_FAILED = 2, /* empirical-boundedness checks failed */
  NNLS_HARD_CHECK_FAILED = 3, /* identity/sign checks failed or solver error */
  NNLS_CONFIG_ERROR = 4,      /* invalid config, parameters or regime */
  NNLS_IO_ERROR = 5,
  NNLS_INTERNAL_ERROR = 6
} nnls_status;

typedef struct nnls_constants nnls_constants;

const char* nnls_version(void);

/* Message describing the most recent failure on this thread. */
const char* nnls_last_error(void);

void nnls_string_free(char* s);

/* --- analysis constants ------------------------------------------------- */

/* Computes S, theta_1 and the Gagliardo-Nirenberg constants for the given
 * exponents.  cache_dir may be NULL (then the NNLS_CONSTANTS_CACHE
 * environment variable is honored, when set). */
nnls_status nnls_constants_compute(int N, const double* s_exponents, int n_exponents,
                                   const char* cache_dir, nnls_constants** out);
void nnls_constants_free(nnls_constants* table);
nnls_status nnls_constants_to_json(const nnls_constants* table, char** json_out);

/* --- configured operations ---------------------------------------------- */
/* Each takes the experiment configuration as a JSON string and produces a
 * report JSON (and for sweeps a CSV block).  The return value carries the
 * check grade: NNLS_OK, NNLS_SOFT_CHECK_FAILED or NNLS_HARD_CHECK_FAILED when
 * the run completed, or an error class when it did not. */

nnls_status nnls_thresholds_json(const char* config_json, char** report_json);
nnls_status nnls_solve_json(const char* config_json, char** report_json);
nnls_status nnls_sweep_csv(const char* config_json, char** csv_out, char** report_json);
nnls_status nnls_homotopy_json(const char* config_json, char** report_json);
nnls_status nnls_run_json(const char* config_json, char** csv_out, char** report_json);

/* Re-runs the identity checks on a stored result (as emitted by
 * nnls_solve_json inside report["results"]). */
nnls_status nnls_verify_json(const char* result_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* NNLS_H */
