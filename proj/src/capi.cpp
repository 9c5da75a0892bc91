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

#include "corrgap/corrgap.h"

#include "corrgap/dataset.hpp"
#include "corrgap/error.hpp"
#include "corrgap/estimators.hpp"
#include "corrgap/metrics.hpp"
#include "corrgap/missingness.hpp"
#include "corrgap/pipeline.hpp"
#include "corrgap/render.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>

struct cg_dataset {
  corrgap::Dataset ds;
};

struct cg_corr {
  corrgap::CorrelationMatrix m;
};

namespace {

thread_local std::string g_last_error;

cg_status fail(cg_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename F>
cg_status guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return CG_OK;
  } catch (const corrgap::ConfigError& e) {
    return fail(CG_ERR_CONFIG, e.what());
  } catch (const corrgap::DataError& e) {
    return fail(CG_ERR_DATA, e.what());
  } catch (const corrgap::NumericError& e) {
    return fail(CG_ERR_NUMERIC, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CG_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CG_ERR_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return fail(CG_ERR_DATA, e.what());
  }
}

void require(const void* p, const char* name) {
  if (!p) throw corrgap::ConfigError(std::string(name) + " must not be NULL");
}

nlohmann::json method_json(const char* text) {
  const std::string s(text);
  auto first = s.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && s[first] == '{') {
    try {
      return nlohmann::json::parse(s);
    } catch (const nlohmann::json::parse_error& e) {
      throw corrgap::ConfigError(std::string("method JSON is invalid: ") + e.what());
    }
  }
  return nlohmann::json{{"method", s}};
}

}  // namespace

extern "C" {

const char* cg_version(void) { return corrgap::kToolVersion; }

const char* cg_last_error(void) { return g_last_error.c_str(); }

cg_status cg_dataset_load_csv(const char* path, int has_header, cg_dataset** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new cg_dataset{corrgap::load_csv(path, has_header != 0)};
  });
}

cg_status cg_dataset_from_array(const double* values, const unsigned char* observed, size_t rows, size_t cols,
                                cg_dataset** out) {
  return guard([&] {
    require(values, "values");
    require(out, "out");
    Eigen::MatrixXd v(rows, cols);
    corrgap::Mask obs(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
      for (size_t j = 0; j < cols; ++j) {
        const double x = values[i * cols + j];
        v(i, j) = x;
        obs(i, j) = observed ? observed[i * cols + j] != 0 : !std::isnan(x);
      }
    }
    *out = new cg_dataset{corrgap::Dataset(std::move(v), std::move(obs))};
  });
}

cg_status cg_dataset_save_csv(const cg_dataset* ds, const char* path) {
  return guard([&] {
    require(ds, "dataset");
    require(path, "path");
    corrgap::write_csv(path, ds->ds);
  });
}

cg_status cg_dataset_save_mask_csv(const cg_dataset* ds, const char* path) {
  return guard([&] {
    require(ds, "dataset");
    require(path, "path");
    corrgap::write_mask_csv(path, ds->ds);
  });
}

cg_status cg_dataset_set_image_shape(cg_dataset* ds, size_t height, size_t width) {
  return guard([&] {
    require(ds, "dataset");
    ds->ds = ds->ds.with_image_shape(corrgap::ImageShape{height, width});
  });
}

size_t cg_dataset_rows(const cg_dataset* ds) { return ds ? ds->ds.rows() : 0; }

size_t cg_dataset_cols(const cg_dataset* ds) { return ds ? ds->ds.cols() : 0; }

cg_status cg_dataset_get(const cg_dataset* ds, size_t row, size_t col, double* value, int* observed) {
  return guard([&] {
    require(ds, "dataset");
    if (row >= ds->ds.rows() || col >= ds->ds.cols()) throw corrgap::ConfigError("cell index out of range");
    if (value) *value = ds->ds.value(row, col);
    if (observed) *observed = ds->ds.is_observed(row, col) ? 1 : 0;
  });
}

double cg_dataset_missing_rate(const cg_dataset* ds) {
  return ds ? corrgap::missing_rate(ds->ds) : std::numeric_limits<double>::quiet_NaN();
}

void cg_dataset_free(cg_dataset* ds) { delete ds; }

cg_status cg_mask_random(const cg_dataset* complete, double rate, uint64_t seed, cg_dataset** out) {
  return guard([&] {
    require(complete, "dataset");
    require(out, "out");
    *out = new cg_dataset{corrgap::apply_random(complete->ds, rate, seed)};
  });
}

cg_status cg_mask_monotone(const cg_dataset* complete, double block_fraction, double affected_row_fraction,
                           uint64_t seed, cg_corner corner, cg_dataset** out) {
  return guard([&] {
    require(complete, "dataset");
    require(out, "out");
    const auto c = corner == CG_CORNER_TOP_RIGHT ? corrgap::Corner::TopRight : corrgap::Corner::BottomRight;
    *out = new cg_dataset{
        corrgap::apply_monotone_block(complete->ds, block_fraction, affected_row_fraction, seed, c)};
  });
}

cg_status cg_normalize(const cg_dataset* ds, const char* mode, cg_dataset** out) {
  return guard([&] {
    require(ds, "dataset");
    require(mode, "mode");
    require(out, "out");
    *out = new cg_dataset{corrgap::normalize(ds->ds, corrgap::parse_normalization_mode(mode)).first};
  });
}

cg_status cg_estimate(const cg_dataset* ds, const char* method, uint64_t seed, cg_corr** out) {
  return guard([&] {
    require(ds, "dataset");
    require(method, "method");
    require(out, "out");
    const auto cfg = corrgap::parse_method_config(method_json(method));
    if (cfg.kind == corrgap::MethodKind::External) {
      throw corrgap::ConfigError("external methods go through cg_estimate_external");
    }
    auto outcome = corrgap::run_method(ds->ds, cfg, seed);
    *out = new cg_corr{std::move(outcome.correlation)};
  });
}

cg_status cg_estimate_external(const cg_dataset* masked, const char* imputed_csv, int has_header, cg_corr** out) {
  return guard([&] {
    require(masked, "dataset");
    require(imputed_csv, "imputed_csv");
    require(out, "out");
    auto completed = corrgap::import_external_imputed(imputed_csv, masked->ds, "External", has_header != 0);
    *out = new cg_corr{corrgap::correlate(completed)};
  });
}

cg_status cg_ground_truth(const cg_dataset* complete, cg_corr** out) {
  return guard([&] {
    require(complete, "dataset");
    require(out, "out");
    *out = new cg_corr{corrgap::ground_truth_correlation(complete->ds)};
  });
}

cg_status cg_corr_load_csv(const char* path, cg_corr** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new cg_corr{corrgap::load_correlation_csv(path)};
  });
}

cg_status cg_corr_save_csv(const cg_corr* corr, const char* path) {
  return guard([&] {
    require(corr, "corr");
    require(path, "path");
    std::vector<std::string> names;
    for (Eigen::Index i = 0; i < corr->m.dim(); ++i) names.push_back("f" + std::to_string(i));
    corrgap::write_correlation_csv(path, corr->m, names);
  });
}

size_t cg_corr_dim(const cg_corr* corr) { return corr ? static_cast<size_t>(corr->m.dim()) : 0; }

cg_status cg_corr_get(const cg_corr* corr, size_t row, size_t col, double* value, int* is_null) {
  return guard([&] {
    require(corr, "corr");
    const auto d = static_cast<size_t>(corr->m.dim());
    if (row >= d || col >= d) throw corrgap::ConfigError("cell index out of range");
    if (value) *value = corr->m.values(row, col);
    if (is_null) *is_null = corr->m.null_mask(row, col) ? 1 : 0;
  });
}

void cg_corr_free(cg_corr* corr) { delete corr; }

cg_status cg_score(const cg_corr* estimate, const cg_corr* truth, double* rmse, size_t* valid_cells) {
  return guard([&] {
    require(estimate, "estimate");
    require(truth, "truth");
    const auto r = corrgap::rmse_corr_detail(estimate->m, truth->m);
    if (rmse) *rmse = r.rmse;
    if (valid_cells) *valid_cells = r.valid_cells;
  });
}

cg_status cg_write_diff_csv(const cg_corr* estimate, const cg_corr* truth, int signed_diff, const char* path) {
  return guard([&] {
    require(estimate, "estimate");
    require(truth, "truth");
    require(path, "path");
    const auto diff = signed_diff ? corrgap::local_signed_diff(estimate->m, truth->m)
                                  : corrgap::local_abs_diff(estimate->m, truth->m);
    std::vector<std::string> names;
    for (Eigen::Index i = 0; i < diff.cols(); ++i) names.push_back("f" + std::to_string(i));
    corrgap::Mask observed = !diff.null_mask;
    corrgap::write_csv(path, corrgap::Dataset(diff.values, std::move(observed), names));
  });
}

cg_status cg_dense_rank(const double* values, size_t n, int ascending, int* ranks) {
  return guard([&] {
    require(values, "values");
    require(ranks, "ranks");
    const auto r = corrgap::dense_rank(std::vector<double>(values, values + n), ascending != 0);
    std::copy(r.begin(), r.end(), ranks);
  });
}

cg_status cg_map_color(double value, int is_null, const char* colormap, double vmin, double vmax,
                       unsigned char rgb[3]) {
  return guard([&] {
    require(colormap, "colormap");
    require(rgb, "rgb");
    const std::string name(colormap);
    corrgap::ColorMap cmap;
    if (name == "correlation") {
      cmap = corrgap::correlation_colormap(vmin, vmax);
    } else if (name == "difference") {
      cmap = corrgap::difference_colormap(vmax);
      cmap.vmin = vmin;
    } else {
      throw corrgap::ConfigError("unknown colormap '" + name + "' (expected correlation or difference)");
    }
    cmap.validate();
    const auto c = corrgap::map_color(is_null ? std::nullopt : std::optional<double>(value), cmap);
    rgb[0] = c.r;
    rgb[1] = c.g;
    rgb[2] = c.b;
  });
}

cg_status cg_run_pipeline(const char* config_path, const char* overrides_json) {
  return guard([&] {
    require(config_path, "config_path");
    const std::filesystem::path path(config_path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw corrgap::ConfigError("cannot open config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(buf.str());
      if (overrides_json && *overrides_json) {
        const auto o = nlohmann::json::parse(overrides_json);
        if (!o.is_object() || !j.is_object()) throw corrgap::ConfigError("overrides must be a JSON object");
        for (auto it = o.begin(); it != o.end(); ++it) j[it.key()] = it.value();
      }
    } catch (const nlohmann::json::parse_error& e) {
      throw corrgap::ConfigError(std::string("invalid JSON: ") + e.what());
    }
    corrgap::run_pipeline(corrgap::parse_config(j, path.parent_path()));
  });
}

cg_status cg_render_report(const char* report_path, const char* output_dir) {
  return guard([&] {
    require(report_path, "report_path");
    const std::filesystem::path report(report_path);
    const std::filesystem::path out = output_dir && *output_dir ? std::filesystem::path(output_dir)
                                                                : report.parent_path();
    corrgap::render_report(report, out);
  });
}

}  // extern "C"
