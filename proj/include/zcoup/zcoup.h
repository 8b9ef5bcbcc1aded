/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#ifndef ZCOUP_ZCOUP_H
#define ZCOUP_ZCOUP_H

#include <stddef.h>
#include <stdint.h>

#if defined(ZCOUP_BUILDING_LIBRARY)
#define ZC_API __attribute__((visibility("default")))
#else
#define ZC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every fallible call returns one; on failure the message is
 * available from zc_last_error() on the calling thread. */
typedef enum zc_status {
  ZC_OK = 0,
  ZC_ERR_INVALID_ARGUMENT = 1,
  ZC_ERR_PARSE = 2,
  ZC_ERR_IO = 3,
  ZC_ERR_UNBALANCED = 4,
  ZC_ERR_EMPTY_TRUNCATION = 5,
  ZC_ERR_DOMAIN = 6,
  ZC_ERR_ORACLE_LIMIT = 7,
  ZC_ERR_NOT_CYCLICALLY_MONOTONE = 8,
  ZC_ERR_EMPTY_SUPPORT = 9,
  ZC_ERR_INTERNAL = 10
} zc_status;

typedef struct zc_measure zc_measure;     /* weighted point cloud */
typedef struct zc_homog zc_homog;         /* homogeneous measure */
typedef struct zc_coupling zc_coupling;   /* zero-coupling with origin reservoir */
typedef struct zc_support zc_support;     /* finite set of (x, y) pairs */
typedef struct zc_potential zc_potential; /* discrete convex potential */

/* Index standing for the origin in coupling entries. */
#define ZC_ORIGIN (-1L)

ZC_API const char* zc_version(void);
ZC_API const char* zc_last_error(void);
/* Strings returned through char** out-parameters are owned by the caller. */
ZC_API void zc_string_free(char* s);

/* ---- discrete measures ---- */
ZC_API zc_status zc_measure_create(size_t dim, const double* coords, const double* weights,
                                   size_t count, zc_measure** out);
ZC_API zc_status zc_measure_parse_csv(const char* text, zc_measure** out);
ZC_API zc_status zc_measure_read_csv(const char* path, zc_measure** out);
ZC_API zc_status zc_measure_to_csv(const zc_measure* m, char** out);
ZC_API void zc_measure_free(zc_measure* m);
ZC_API size_t zc_measure_dim(const zc_measure* m);
ZC_API size_t zc_measure_size(const zc_measure* m);
ZC_API double zc_measure_total(const zc_measure* m);
/* coords must hold dim values. */
ZC_API zc_status zc_measure_atom(const zc_measure* m, size_t i, double* coords, double* weight);
/* Annulus r_lo <= |x| < r_hi; pass INFINITY for an unbounded annulus. */
ZC_API zc_status zc_measure_mass_annulus(const zc_measure* m, double r_lo, double r_hi,
                                         double* out);

/* ---- homogeneous measures (key = value config text) ---- */
ZC_API zc_status zc_homog_parse_config(const char* text, zc_homog** out);
ZC_API zc_status zc_homog_read_config(const char* path, zc_homog** out);
ZC_API void zc_homog_free(zc_homog* h);
ZC_API size_t zc_homog_dim(const zc_homog* h);
ZC_API zc_status zc_homog_mass_annulus(const zc_homog* h, double r_lo, double r_hi, double* out);
ZC_API zc_status zc_homog_mass_cone(const zc_homog* h, const double* direction, double eps,
                                    int* infinite, double* cap_mass);

typedef enum zc_discretize_mode { ZC_QUADRATURE = 0, ZC_MONTE_CARLO = 1 } zc_discretize_mode;

ZC_API zc_status zc_discretize(const zc_homog* h, double r_lo, double r_hi,
                               zc_discretize_mode mode, int resolution, uint64_t seed,
                               zc_measure** out);
/* Each side is given either as a discrete measure or as a homogeneous one
 * (exactly one of the pair non-null). */
ZC_API zc_status zc_truncate_and_balance(const zc_measure* mu_d, const zc_homog* mu_h,
                                         const zc_measure* nu_d, const zc_homog* nu_h, int n,
                                         zc_discretize_mode mode, int resolution, uint64_t seed,
                                         zc_measure** mu_out, zc_measure** nu_out);

/* ---- couplings ---- */
ZC_API zc_status zc_solve(const zc_measure* mu, const zc_measure* nu, int reservoir,
                          zc_coupling** out);
ZC_API zc_status zc_solve_1d(const zc_measure* mu, const zc_measure* nu, zc_coupling** out);
ZC_API zc_status zc_trivial_coupling(const zc_measure* mu, const zc_measure* nu,
                                     zc_coupling** out);
ZC_API zc_status zc_brute_force(const zc_measure* mu, const zc_measure* nu, int reservoir,
                                double* cost, zc_coupling** out);
ZC_API zc_status zc_coupling_parse_csv(const char* text, const zc_measure* mu,
                                       const zc_measure* nu, zc_coupling** out);
ZC_API zc_status zc_coupling_to_csv(const zc_coupling* g, char** out);
ZC_API void zc_coupling_free(zc_coupling* g);
ZC_API size_t zc_coupling_size(const zc_coupling* g);
ZC_API zc_status zc_coupling_entry(const zc_coupling* g, size_t i, long* src, long* dst,
                                   double* mass);
ZC_API double zc_coupling_cost(const zc_coupling* g);
ZC_API zc_status zc_coupling_margins(const zc_coupling* g, double* max_left, double* max_right);
ZC_API zc_status zc_coupling_residuals(const zc_coupling* g, double* left, double* right);
ZC_API int zc_coupling_is_proper(const zc_coupling* g, double tol);
ZC_API zc_status zc_coupling_support(const zc_coupling* g, int with_origin, zc_support** out);
/* JSON object {cost, left_residual, right_residual, cm_check, proper,
 * max_margin_violation, entries}. */
ZC_API zc_status zc_coupling_report_json(const zc_coupling* g, double tol, char** out);

/* ---- supports and potentials ---- */
ZC_API zc_status zc_support_parse_csv(const char* text, zc_support** out);
ZC_API zc_status zc_support_read_csv(const char* path, zc_support** out);
ZC_API zc_status zc_support_to_csv(const zc_support* s, char** out);
ZC_API void zc_support_free(zc_support* s);
ZC_API size_t zc_support_size(const zc_support* s);
ZC_API size_t zc_support_dim(const zc_support* s);
ZC_API zc_status zc_support_is_monotone(const zc_support* s, double tol, int* ok);
/* ok receives the verdict; report (optional) receives JSON with the witness
 * cycle and its value on failure. */
ZC_API zc_status zc_support_is_cyclically_monotone(const zc_support* s, double tol, int* ok,
                                                   char** report);
ZC_API zc_status zc_potential_build(const zc_support* s, size_t base_index, double tol,
                                    zc_potential** out);
ZC_API zc_status zc_potential_to_csv(const zc_potential* p, char** out);
ZC_API void zc_potential_free(zc_potential* p);
ZC_API zc_status zc_potential_contains(const zc_potential* p, const double* x, const double* v,
                                       double tol, int* ok);
ZC_API zc_status zc_push_forward_potential(const zc_potential* p, const zc_measure* m,
                                           zc_measure** out, double* origin_residual);

/* ---- criteria, oracle and experiments (JSON reports) ---- */
ZC_API zc_status zc_check_criteria(const zc_homog* mu, const zc_homog* nu, int grid,
                                   int* holds, char** report);
ZC_API zc_status zc_probe_halfspace(const zc_homog* mu, const zc_homog* nu, int grid,
                                    char** report);
/* grad_scale multiplies the closed-form gradient (1 for the exact map). */
ZC_API zc_status zc_oracle_verify(int resolution, double tol, double grad_scale, int* pass,
                                  char** report);

typedef struct zc_experiment_params {
  size_t n;
  const double* t_grid;
  size_t t_count;
  int seeds;
  uint64_t master_seed;
  double window_r_lo, window_r_hi, window_y_max;
  int reference_resolution;
} zc_experiment_params;

/* p_config and q_config are model config texts. csv receives one row per
 * (t, seed); summary receives the JSON medians. */
ZC_API zc_status zc_tail_experiment(const char* p_config, const char* q_config,
                                    const zc_experiment_params* params, char** csv,
                                    char** summary);

/* ---- file helpers ---- */
ZC_API zc_status zc_write_file(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif /* ZCOUP_ZCOUP_H */
