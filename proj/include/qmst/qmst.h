#ifndef QMST_QMST_H
#define QMST_QMST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#  ifdef QMST_BUILDING_LIBRARY
#    define QMST_API __declspec(dllexport)
#  else
#    define QMST_API __declspec(dllimport)
#  endif
#else
#  define QMST_API __attribute__((visibility("default")))
#endif

typedef struct qmst_instance qmst_instance;
typedef struct qmst_params qmst_params;
typedef struct qmst_result qmst_result;
typedef struct qmst_report qmst_report;

typedef enum qmst_status {
  QMST_OK = 0,
  QMST_ERR_INVALID_ARGUMENT = 1,
  QMST_ERR_IO = 2,
  QMST_ERR_PARSE = 3,
  QMST_ERR_NUMERIC = 4,
  QMST_ERR_LIMIT = 5,
  QMST_ERR_INTERNAL = 6
} qmst_status;

typedef enum qmst_termination {
  QMST_TERM_RESIDUAL = 0,
  QMST_TERM_GAP_CLOSED = 1,
  QMST_TERM_FEW_CUTS = 2,
  QMST_TERM_SMALL_IMPROVEMENT = 3,
  QMST_TERM_OUTER_CAP = 4,
  QMST_TERM_ITER_CAP = 5,
  QMST_TERM_TIME_LIMIT = 6
} qmst_termination;

typedef struct qmst_summary {
  double lb_dnn;
  double time_dnn;
  double lb_cuts;
  double time_total;
  double tau;
  int iterations;
  int cuts_added;
  int rounds;
  int termination; /* qmst_termination */
} qmst_summary;

typedef struct qmst_round {
  int round;
  int inner_iterations;
  double valid_lb;
  double best_lb;
  double primal_residual;
  double dual_residual;
  int cuts_active;
  int cuts_found;
  int cuts_added;
  double seconds;
} qmst_round;

/* Message of the last failed call on this thread; "" if none. */
QMST_API const char* qmst_last_error(void);
QMST_API const char* qmst_version(void);
QMST_API const char* qmst_status_name(qmst_status status);
QMST_API const char* qmst_termination_name(int termination);

/* Instances. Vertices and edges are 0-based. */
QMST_API qmst_status qmst_instance_generate(const char* family, int n, int density, uint64_t seed, double cmax_diag,
                                            double cmax_off, qmst_instance** out);
/* endpoints: 2*m vertex ids; q: m*m row-major symmetric costs. */
QMST_API qmst_status qmst_instance_create(int n, int m, const int* endpoints, const double* q, qmst_instance** out);
QMST_API qmst_status qmst_instance_read(const char* path, qmst_instance** out);
QMST_API qmst_status qmst_instance_write(const qmst_instance* inst, const char* path);
QMST_API void qmst_instance_free(qmst_instance* inst);
QMST_API int qmst_instance_n(const qmst_instance* inst);
QMST_API int qmst_instance_m(const qmst_instance* inst);
/* Generation density if known, else round(100 m / (n(n-1)/2)). */
QMST_API int qmst_instance_density(const qmst_instance* inst);
QMST_API qmst_status qmst_instance_edge(const qmst_instance* inst, int k, int* u, int* v);
QMST_API qmst_status qmst_instance_cost(const qmst_instance* inst, int e, int f, double* out);
/* Returns 1 and stores the upper bound if one is attached, else 0. */
QMST_API int qmst_instance_get_ub(const qmst_instance* inst, double* ub);
QMST_API qmst_status qmst_instance_set_ub(qmst_instance* inst, double ub);
QMST_API void qmst_instance_clear_ub(qmst_instance* inst);

/* Solver parameters, addressed by key:
 * tau (0 = automatic), gamma1, gamma2, eps_prsm, eps_proj, cut_violation_eps,
 * ncutsmax (-1 = m), ncutsmin, epslbimprov, noutermax, max_total_iters,
 * time_limit, max_dykstra_cycles, use_cuts (0/1). */
QMST_API qmst_status qmst_params_create(qmst_params** out);
QMST_API void qmst_params_free(qmst_params* params);
QMST_API qmst_status qmst_params_set(qmst_params* params, const char* key, double value);
QMST_API qmst_status qmst_params_get(const qmst_params* params, const char* key, double* value);
QMST_API qmst_status qmst_params_validate(const qmst_params* params);
/* NULL-terminated list of keys. */
QMST_API const char* const* qmst_params_keys(void);

/* Lower bound; params may be NULL for defaults. */
QMST_API qmst_status qmst_solve(const qmst_instance* inst, const qmst_params* params, qmst_result** out);
QMST_API qmst_status qmst_result_summary(const qmst_result* result, qmst_summary* out);
QMST_API int qmst_result_round_count(const qmst_result* result);
QMST_API qmst_status qmst_result_round(const qmst_result* result, int index, qmst_round* out);
QMST_API void qmst_result_free(qmst_result* result);

/* Exact optimum by enumeration (n <= 12) and heuristic upper bound.
 * x may be NULL, otherwise it receives m incidence values. */
QMST_API qmst_status qmst_exact(const qmst_instance* inst, double* value, double* x);
QMST_API qmst_status qmst_upper_bound(const qmst_instance* inst, int effort, double* value, double* x);

/* Structural checks. perturb != 0 corrupts embedded data (test hook). */
QMST_API qmst_status qmst_validate(int perturb, int max_n, qmst_report** out);
QMST_API int qmst_report_passed(const qmst_report* report);
QMST_API const char* qmst_report_text(const qmst_report* report);
QMST_API int qmst_report_group_count(const qmst_report* report);
QMST_API const char* qmst_report_group_name(const qmst_report* report, int index);
QMST_API int qmst_report_group_passed(const qmst_report* report, int index);
QMST_API void qmst_report_free(qmst_report* report);

#ifdef __cplusplus
}
#endif

#endif /* QMST_QMST_H */
