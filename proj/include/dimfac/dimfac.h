/* SPDX-License-Identifier: Apache-2.0
 * Copyright 2026 The dimfac Authors
 *
 * C interface to the dimfac solver library. Every function that can fail
 * returns a dimfac_status; the message of the most recent failure on the
 * calling thread is available from dimfac_last_error().
 */

#ifndef DIMFAC_DIMFAC_H
#define DIMFAC_DIMFAC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DIMFAC_BUILDING)
#define DIMFAC_API __declspec(dllexport)
#else
#define DIMFAC_API __declspec(dllimport)
#endif
#else
#define DIMFAC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dimfac_status {
  DIMFAC_OK = 0,
  DIMFAC_E_INVALID_ARGUMENT = 1,
  DIMFAC_E_IO = 2,
  DIMFAC_E_CONFIG = 3,
  DIMFAC_E_SYNTAX = 4,
  DIMFAC_E_UNKNOWN_VARIABLE = 5,
  DIMFAC_E_DOMAIN = 6,
  DIMFAC_E_DEGENERATE_SHAPE = 7,
  DIMFAC_E_UNSUPPORTED_SHAPE = 8,
  DIMFAC_E_INFEASIBLE = 9,
  DIMFAC_E_UNSUITABLE = 10,
  DIMFAC_E_SIZE_LIMIT = 11,
  DIMFAC_E_CONSTRUCTION_FAILURE = 12,
  DIMFAC_E_MONOTONICITY = 13,
  DIMFAC_E_NEGATIVITY = 14,
  DIMFAC_E_MISMATCH = 15,
  DIMFAC_E_INTERNAL = 99
} dimfac_status;

typedef struct dimfac_instance dimfac_instance;
typedef struct dimfac_solution dimfac_solution;

DIMFAC_API const char* dimfac_version(void);
/* Short name of a status, e.g. "unsuitable". */
DIMFAC_API const char* dimfac_status_name(dimfac_status status);
/* Message of the last failure on this thread; "" when none. */
DIMFAC_API const char* dimfac_last_error(void);
/* DIMFAC_THREADS when set to a positive integer, else the core count. */
DIMFAC_API int dimfac_default_threads(void);
/* Frees strings returned through char** out parameters. */
DIMFAC_API void dimfac_string_free(char* s);

/* Parses a config and discretizes it. threads <= 0 uses the default. */
DIMFAC_API dimfac_status dimfac_instance_load(const char* path, int threads, dimfac_instance** out);
DIMFAC_API dimfac_status dimfac_instance_from_json(const char* json, int threads, dimfac_instance** out);
DIMFAC_API void dimfac_instance_free(dimfac_instance* inst);

DIMFAC_API int dimfac_instance_facilities(const dimfac_instance* inst);
DIMFAC_API int dimfac_instance_cells(const dimfac_instance* inst);
DIMFAC_API int dimfac_instance_nx(const dimfac_instance* inst);
DIMFAC_API int dimfac_instance_ny(const dimfac_instance* inst);
/* Seed from the config's solver section. */
DIMFAC_API uint64_t dimfac_instance_seed(const dimfac_instance* inst);
DIMFAC_API double dimfac_instance_preprocess_seconds(const dimfac_instance* inst);
DIMFAC_API size_t dimfac_instance_warning_count(const dimfac_instance* inst);
/* NULL when index is out of range. Valid until the instance is freed. */
DIMFAC_API const char* dimfac_instance_warning(const dimfac_instance* inst, size_t index);
/* Canonical config JSON. */
DIMFAC_API dimfac_status dimfac_instance_to_json(const dimfac_instance* inst, char** out);

typedef struct dimfac_solve_options {
  uint64_t seed;  /* used when has_seed != 0, else the config seed */
  int has_seed;
  int threads;    /* <= 0: default */
} dimfac_solve_options;

/* opts may be NULL. */
DIMFAC_API dimfac_status dimfac_solve_grasp(const dimfac_instance* inst, const dimfac_solve_options* opts,
                                            dimfac_solution** out);
DIMFAC_API dimfac_status dimfac_solve_exact(const dimfac_instance* inst, const dimfac_solve_options* opts,
                                            dimfac_solution** out);
/* cells holds k0, l0, k1, l1, ... for n facilities. An unsuitable placement
 * fails with DIMFAC_E_UNSUITABLE naming the facility or pair. */
DIMFAC_API dimfac_status dimfac_evaluate(const dimfac_instance* inst, const int* cells, size_t n,
                                         dimfac_solution** out);

/* Reads a solution record; fails with DIMFAC_E_MISMATCH when it was produced
 * for a different instance. */
DIMFAC_API dimfac_status dimfac_solution_load(const dimfac_instance* inst, const char* path,
                                              dimfac_solution** out);
DIMFAC_API void dimfac_solution_free(dimfac_solution* sol);

DIMFAC_API double dimfac_solution_total(const dimfac_solution* sol);
DIMFAC_API double dimfac_solution_lost(const dimfac_solution* sol);
DIMFAC_API double dimfac_solution_solve_seconds(const dimfac_solution* sol);
/* Copies up to 2 * capacity ints (k, l pairs); returns the facility count. */
DIMFAC_API size_t dimfac_solution_placement(const dimfac_solution* sol, int* cells, size_t capacity);
/* Per-facility cost terms; index out of range yields NaN. */
DIMFAC_API double dimfac_solution_install(const dimfac_solution* sol, size_t i);
DIMFAC_API double dimfac_solution_congestion(const dimfac_solution* sol, size_t i);
DIMFAC_API double dimfac_solution_assigned_mass(const dimfac_solution* sol, size_t i);
DIMFAC_API dimfac_status dimfac_solution_to_json(const dimfac_solution* sol, char** out);
DIMFAC_API dimfac_status dimfac_solution_write(const dimfac_solution* sol, const char* path);

typedef struct dimfac_milp_info {
  size_t variables;
  size_t binaries;
  size_t constraints;
  double big_m;
  int oversized; /* more rows than the large-model threshold */
} dimfac_milp_info;

/* warm_start may be NULL; info may be NULL. */
DIMFAC_API dimfac_status dimfac_export_milp(const dimfac_instance* inst, const char* path,
                                            const dimfac_solution* warm_start, int threads,
                                            dimfac_milp_info* info);

DIMFAC_API dimfac_status dimfac_render_svg(const dimfac_instance* inst, const dimfac_solution* sol,
                                           const char* path, int show_grid);

#ifdef __cplusplus
}
#endif

#endif /* DIMFAC_DIMFAC_H */
