/*
 * Copyright 2026 The corrgap Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the corrgap library.
 *
 * Handles are opaque and owned by the caller; release them with the
 * matching *_free function. Every fallible call returns a cg_status and
 * leaves a message retrievable with cg_last_error() on the same thread.
 */
#ifndef CORRGAP_CORRGAP_H
#define CORRGAP_CORRGAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CORRGAP_BUILDING)
#    define CG_API __declspec(dllexport)
#  else
#    define CG_API __declspec(dllimport)
#  endif
#else
#  define CG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cg_dataset cg_dataset;
typedef struct cg_corr cg_corr;

/* Values double as process exit codes in the CLI. */
typedef enum cg_status {
  CG_OK = 0,
  CG_ERR_CONFIG = 1,
  CG_ERR_DATA = 2,
  CG_ERR_NUMERIC = 3
} cg_status;

typedef enum cg_corner { CG_CORNER_BOTTOM_RIGHT = 0, CG_CORNER_TOP_RIGHT = 1 } cg_corner;

CG_API const char* cg_version(void);
/* Message for the last failed call on this thread; "" if none. */
CG_API const char* cg_last_error(void);

/* --- datasets ----------------------------------------------------------- */

CG_API cg_status cg_dataset_load_csv(const char* path, int has_header, cg_dataset** out);
/* Row-major values. `observed` may be NULL, in which case NaN marks a
 * missing cell. */
CG_API cg_status cg_dataset_from_array(const double* values, const unsigned char* observed, size_t rows,
                                       size_t cols, cg_dataset** out);
CG_API cg_status cg_dataset_save_csv(const cg_dataset* ds, const char* path);
/* 0/1 CSV, 1 = missing. */
CG_API cg_status cg_dataset_save_mask_csv(const cg_dataset* ds, const char* path);
CG_API cg_status cg_dataset_set_image_shape(cg_dataset* ds, size_t height, size_t width);
CG_API size_t cg_dataset_rows(const cg_dataset* ds);
CG_API size_t cg_dataset_cols(const cg_dataset* ds);
CG_API cg_status cg_dataset_get(const cg_dataset* ds, size_t row, size_t col, double* value, int* observed);
CG_API double cg_dataset_missing_rate(const cg_dataset* ds);
CG_API void cg_dataset_free(cg_dataset* ds);

CG_API cg_status cg_mask_random(const cg_dataset* complete, double rate, uint64_t seed, cg_dataset** out);
CG_API cg_status cg_mask_monotone(const cg_dataset* complete, double block_fraction, double affected_row_fraction,
                                  uint64_t seed, cg_corner corner, cg_dataset** out);
/* mode: "minmax", "zscore" or "none"; statistics come from observed cells. */
CG_API cg_status cg_normalize(const cg_dataset* ds, const char* mode, cg_dataset** out);

/* --- estimation --------------------------------------------------------- */

/* method_json: {"method": "knn", "k": 5} and friends; a bare method name
 * such as "dper" is accepted too. */
CG_API cg_status cg_estimate(const cg_dataset* ds, const char* method_json, uint64_t seed, cg_corr** out);
/* Correlation of an externally imputed CSV merged onto `masked`. */
CG_API cg_status cg_estimate_external(const cg_dataset* masked, const char* imputed_csv, int has_header,
                                      cg_corr** out);
/* Correlation of a fully observed dataset. */
CG_API cg_status cg_ground_truth(const cg_dataset* complete, cg_corr** out);

/* --- correlation matrices ------------------------------------------------ */

CG_API cg_status cg_corr_load_csv(const char* path, cg_corr** out);
CG_API cg_status cg_corr_save_csv(const cg_corr* corr, const char* path);
CG_API size_t cg_corr_dim(const cg_corr* corr);
CG_API cg_status cg_corr_get(const cg_corr* corr, size_t row, size_t col, double* value, int* is_null);
CG_API void cg_corr_free(cg_corr* corr);

/* --- metrics ------------------------------------------------------------- */

CG_API cg_status cg_score(const cg_corr* estimate, const cg_corr* truth, double* rmse, size_t* valid_cells);
/* Writes |est - truth| (signed = 0) or est - truth (signed = 1) as CSV. */
CG_API cg_status cg_write_diff_csv(const cg_corr* estimate, const cg_corr* truth, int signed_diff,
                                   const char* path);
CG_API cg_status cg_dense_rank(const double* values, size_t n, int ascending, int* ranks);

/* --- rendering ----------------------------------------------------------- */

/* colormap: "correlation" (blue-white-red) or "difference" (white-green).
 * is_null selects the gray null color. */
CG_API cg_status cg_map_color(double value, int is_null, const char* colormap, double vmin, double vmax,
                              unsigned char rgb[3]);

/* --- pipeline ------------------------------------------------------------ */

/* Runs the experiment in `config_path`. overrides_json (may be NULL) is a
 * JSON object merged over the config's top-level keys. */
CG_API cg_status cg_run_pipeline(const char* config_path, const char* overrides_json);
CG_API cg_status cg_render_report(const char* report_path, const char* output_dir);

#ifdef __cplusplus
}
#endif

#endif /* CORRGAP_CORRGAP_H */
