/*
 * discop — joint distributions over ordered categorical supports from
 * marginals via copulas, plus conformance checks (aggregation invariance,
 * neutrality, copula extraction) for arbitrary marginal-to-joint models.
 *
 * C API over the C++ core: opaque handles, integer status codes, and
 * JSON/text payloads. Every function that can fail returns discop_status;
 * on error, discop_last_error() describes what went wrong (thread-local).
 * Strings returned through char** are heap-allocated and must be released
 * with discop_string_free().
 */
#ifndef DISCOP_H
#define DISCOP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum discop_status {
    DISCOP_OK = 0,
    DISCOP_ERR_INVALID = 1,     /* bad argument or domain violation */
    DISCOP_ERR_PARSE = 2,       /* malformed JSON input */
    DISCOP_ERR_UNSUPPORTED = 3, /* valid but out of scope (e.g. gaussian n>=5) */
    DISCOP_ERR_ORACLE = 4,      /* external oracle failed or timed out */
    DISCOP_ERR_INTERNAL = 5
} discop_status;

typedef struct discop_profile discop_profile;
typedef struct discop_copula discop_copula;
typedef struct discop_joint discop_joint;
typedef struct discop_model discop_model;
typedef struct discop_report discop_report;
typedef struct discop_grid discop_grid;

const char* discop_version(void);
/* Message for the most recent failing call on this thread ("" if none). */
const char* discop_last_error(void);
void discop_string_free(char* s);

/* ---- profiles: JSON array of arrays of bin masses ---- */
discop_status discop_profile_parse(const char* json, discop_profile** out);
discop_status discop_profile_to_json(const discop_profile* p, char** out);
int discop_profile_dims(const discop_profile* p);
/* dim and bin are 1-based; merges bins (bin, bin+1) of dimension dim. */
discop_status discop_profile_collapse(const discop_profile* p, int dim, int bin,
                                      discop_profile** out);
void discop_profile_free(discop_profile* p);

/* ---- copulas ---- */
/* Accepts a CopulaSpec JSON object or a bare family name; fallback_dim is
 * used when the spec does not pin a dimension (pass 0 to require one). */
discop_status discop_copula_parse(const char* json_or_name, int fallback_dim,
                                  discop_copula** out);
typedef double (*discop_copula_fn)(const double* x, int n, void* ctx);
discop_status discop_copula_custom(int dim, discop_copula_fn fn, void* ctx,
                                   discop_copula** out);
int discop_copula_dim(const discop_copula* c);
discop_status discop_copula_evaluate(const discop_copula* c, const double* x, int n, double* out);
discop_status discop_copula_rectangle(const discop_copula* c, const double* lower,
                                      const double* upper, int n, double* out);
/* Axiom report as JSON (grounded / uniform marginals / n-increasing plus
 * worst violations and the partition-of-unity sum). *pass_out is 1 when all
 * three axioms hold at the family's tolerance. */
discop_status discop_copula_check_axioms(const discop_copula* c, int grid_depth, int* pass_out,
                                         char** json_out);
void discop_copula_free(discop_copula* c);

/* ---- joints ---- */
discop_status discop_joint_build(const discop_copula* c, const discop_profile* p,
                                 discop_joint** out);
discop_status discop_joint_maximal_coupling(const discop_profile* p, discop_joint** out);
int discop_joint_dims(const discop_joint* j);
/* s is a 1-based multi-index of length n; entries may be 0 for the cdf. */
discop_status discop_joint_cdf(const discop_joint* j, const int* s, int n, double* out);
discop_status discop_joint_marginal(const discop_joint* j, int dim, char** json_out);
discop_status discop_joint_to_json(const discop_joint* j, char** out);
discop_status discop_joint_render_table(const discop_joint* j, char** out);
void discop_joint_free(discop_joint* j);

/* ---- models (marginals -> joint oracles) ----
 * spec: "independence" | "frechet-upper" | "maximal-coupling"
 *     | "copula:<name-or-json-or-path>" | "exec:<command line>"     */
discop_status discop_model_create(const char* spec, discop_model** out);
discop_status discop_model_from_copula(const discop_copula* c, discop_model** out);
discop_status discop_model_query(const discop_model* m, const discop_profile* p,
                                 discop_joint** out);
double discop_model_default_tol(const discop_model* m);
void discop_model_free(discop_model* m);

/* ---- conformance ----
 * All checks return DISCOP_OK when the check ran (read the verdict from the
 * report); errors are reserved for invalid inputs and oracle breakdowns.
 * Pass tol <= 0 to use the model's default tolerance. */
discop_status discop_check_ia_at(const discop_model* m, const discop_profile* p, int dim, int bin,
                                 double tol, discop_report** out);
discop_status discop_check_ia_randomized(const discop_model* m, long trials, uint64_t seed,
                                         int dims, int zmax, double tol, discop_report** out);
discop_status discop_extract_copula(const discop_model* m, const double* x, int n, double* out);
discop_status discop_extract_grid(const discop_model* m, int dims, int grid_depth,
                                  discop_grid** out);
discop_status discop_grid_to_json(const discop_grid* g, char** out);
discop_status discop_grid_value(const discop_grid* g, const double* x, int n, double* out);
void discop_grid_free(discop_grid* g);
discop_status discop_verify_extraction_spec(const discop_model* m, const discop_copula* hypothesis,
                                            long trials, uint64_t seed, int zmax, double tol,
                                            discop_report** out);
discop_status discop_verify_extraction_grid(const discop_model* m, const discop_grid* hypothesis,
                                            long trials, uint64_t seed, int zmax, double tol,
                                            discop_report** out);
/* sigma is a 1-based permutation of {1..len}. */
discop_status discop_check_m_neutrality_at(const discop_model* m, const discop_profile* p, int dim,
                                           const int* sigma, int len, double tol,
                                           discop_report** out);
discop_status discop_check_m_neutrality_randomized(const discop_model* m, long trials,
                                                   uint64_t seed, int dims, int zmax, double tol,
                                                   discop_report** out);
/* m_dims: 1-based dimension indices forming the set M. */
discop_status discop_verify_factorization(const discop_copula* c, const int* m_dims, int m_len,
                                          int grid_depth, double tol, discop_report** out);

/* ---- reports ---- */
/* "pass" | "fail" | "not-a-model" */
const char* discop_report_verdict(const discop_report* r);
double discop_report_worst(const discop_report* r);
long discop_report_trials(const discop_report* r);
discop_status discop_report_to_json(const discop_report* r, char** out);
void discop_report_free(discop_report* r);

#ifdef __cplusplus
}
#endif

#endif /* DISCOP_H */
