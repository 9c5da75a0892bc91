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

// corrgap command-line front end. Talks to the library only through the C API.
#include "corrgap/corrgap.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>

namespace {

struct DatasetDeleter {
  void operator()(cg_dataset* p) const { cg_dataset_free(p); }
};
struct CorrDeleter {
  void operator()(cg_corr* p) const { cg_corr_free(p); }
};
using DatasetPtr = std::unique_ptr<cg_dataset, DatasetDeleter>;
using CorrPtr = std::unique_ptr<cg_corr, CorrDeleter>;

// Thrown to unwind with a status already recorded by the library.
struct Failure {
  cg_status status;
};

void check(cg_status s) {
  if (s != CG_OK) throw Failure{s};
}

DatasetPtr load(const std::string& path, bool has_header) {
  cg_dataset* ds = nullptr;
  check(cg_dataset_load_csv(path.c_str(), has_header ? 1 : 0, &ds));
  return DatasetPtr(ds);
}

CorrPtr load_corr(const std::string& path) {
  cg_corr* c = nullptr;
  check(cg_corr_load_csv(path.c_str(), &c));
  return CorrPtr(c);
}

bool parse_shape(const std::string& text, size_t& h, size_t& w) {
  unsigned long a = 0, b = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lux%lu%c", &a, &b, &tail) != 2 || a == 0 || b == 0) return false;
  h = a;
  w = b;
  return true;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

struct RunArgs {
  std::string config;
  std::string output_dir;
  long long seed = -1;
  int workers = -1;
  bool normalize_on_complete = false;
};

struct MaskArgs {
  std::string input, output, dump_mask, image_shape;
  std::string pattern = "random";
  std::string corner = "bottom-right";
  double rate = 0.1;
  double block_fraction = 0.5;
  double affected_rows = 0.5;
  unsigned long long seed = 0;
  bool no_header = false;
};

struct EstimateArgs {
  std::string input, output, method = "dper", params, normalize = "minmax", imputed;
  unsigned long long seed = 0;
  bool no_header = false;
  bool imputed_no_header = false;
};

struct ScoreArgs {
  std::string truth, estimate, abs_diff, signed_diff;
  bool json = false;
};

struct RenderArgs {
  std::string report, output_dir;
};

void do_run(const RunArgs& a) {
  std::string overrides = "{";
  auto add = [&](const std::string& kv) {
    if (overrides.size() > 1) overrides += ",";
    overrides += kv;
  };
  if (!a.output_dir.empty()) add("\"output_dir\":" + json_string(std::filesystem::absolute(a.output_dir).string()));
  if (a.seed >= 0) add("\"seed\":" + std::to_string(a.seed));
  if (a.workers >= 0) add("\"workers\":" + std::to_string(a.workers));
  if (a.normalize_on_complete) add("\"normalize_on_complete\":true");
  overrides += "}";
  check(cg_run_pipeline(a.config.c_str(), overrides.c_str()));
}

void do_mask(const MaskArgs& a) {
  auto ds = load(a.input, !a.no_header);
  if (!a.image_shape.empty()) {
    size_t h = 0, w = 0;
    if (!parse_shape(a.image_shape, h, w)) {
      std::fprintf(stderr, "corrgap: error: --image-shape expects HxW, got '%s'\n", a.image_shape.c_str());
      throw Failure{CG_ERR_CONFIG};
    }
    check(cg_dataset_set_image_shape(ds.get(), h, w));
  }
  cg_dataset* masked = nullptr;
  if (a.pattern == "random") {
    check(cg_mask_random(ds.get(), a.rate, a.seed, &masked));
  } else {
    const auto corner = a.corner == "top-right" ? CG_CORNER_TOP_RIGHT : CG_CORNER_BOTTOM_RIGHT;
    check(cg_mask_monotone(ds.get(), a.block_fraction, a.affected_rows, a.seed, corner, &masked));
  }
  DatasetPtr out(masked);
  check(cg_dataset_save_csv(out.get(), a.output.c_str()));
  if (!a.dump_mask.empty()) check(cg_dataset_save_mask_csv(out.get(), a.dump_mask.c_str()));
}

void do_estimate(const EstimateArgs& a) {
  auto ds = load(a.input, !a.no_header);
  cg_corr* corr = nullptr;
  if (a.method == "external") {
    if (a.imputed.empty()) {
      std::fprintf(stderr, "corrgap: error: --method external needs --imputed FILE\n");
      throw Failure{CG_ERR_CONFIG};
    }
    check(cg_estimate_external(ds.get(), a.imputed.c_str(), a.imputed_no_header ? 0 : 1, &corr));
  } else {
    cg_dataset* norm = nullptr;
    check(cg_normalize(ds.get(), a.normalize.c_str(), &norm));
    DatasetPtr input(norm);
    std::string spec = a.params.empty() ? "{}" : a.params;
    const auto brace = spec.find('{');
    if (brace == std::string::npos) {
      std::fprintf(stderr, "corrgap: error: --params must be a JSON object\n");
      throw Failure{CG_ERR_CONFIG};
    }
    const bool empty = spec.find_first_not_of(" \t\r\n", brace + 1) == spec.find('}', brace);
    spec.insert(brace + 1, "\"method\":" + json_string(a.method) + (empty ? "" : ","));
    check(cg_estimate(input.get(), spec.c_str(), a.seed, &corr));
  }
  CorrPtr out(corr);
  check(cg_corr_save_csv(out.get(), a.output.c_str()));
}

void do_score(const ScoreArgs& a) {
  auto truth = load_corr(a.truth);
  auto est = load_corr(a.estimate);
  double rmse = 0.0;
  size_t valid = 0;
  check(cg_score(est.get(), truth.get(), &rmse, &valid));
  if (!a.abs_diff.empty()) check(cg_write_diff_csv(est.get(), truth.get(), 0, a.abs_diff.c_str()));
  if (!a.signed_diff.empty()) check(cg_write_diff_csv(est.get(), truth.get(), 1, a.signed_diff.c_str()));
  if (a.json) {
    std::printf("{\"rmse\": %.17g, \"valid_cells\": %zu}\n", rmse, valid);
  } else {
    std::printf("RMSE: %.4f\n", rmse);
  }
}

void do_render(const RenderArgs& a) {
  check(cg_render_report(a.report.c_str(), a.output_dir.empty() ? nullptr : a.output_dir.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrgap: correlation estimation under missing data"};
  app.set_version_flag("--version", std::string(cg_version()));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a full experiment from a JSON config");
  run_cmd->add_option("config", run.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--output-dir", run.output_dir, "Override the config's output directory");
  run_cmd->add_option("--seed", run.seed, "Override the config's seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--workers", run.workers, "Concurrent method x rate jobs (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--normalize-on-complete", run.normalize_on_complete,
                    "Fit normalization on the complete data instead of the observed cells");

  MaskArgs mask;
  auto* mask_cmd = app.add_subcommand("mask", "Insert missing values into a complete CSV");
  mask_cmd->add_option("-i,--input", mask.input, "Complete data CSV")->required();
  mask_cmd->add_option("-o,--output", mask.output, "Masked data CSV (missing = NaN)")->required();
  mask_cmd->add_option("--pattern", mask.pattern, "random or monotone")
      ->check(CLI::IsMember({"random", "monotone"}));
  mask_cmd->add_option("--rate", mask.rate, "Missing rate for the random pattern");
  mask_cmd->add_option("--block-fraction", mask.block_fraction, "Corner block side fraction (monotone)");
  mask_cmd->add_option("--affected-rows", mask.affected_rows, "Fraction of rows that get the block (monotone)");
  mask_cmd->add_option("--corner", mask.corner, "bottom-right or top-right")
      ->check(CLI::IsMember({"bottom-right", "top-right"}));
  mask_cmd->add_option("--image-shape", mask.image_shape, "Feature layout as HxW (monotone)");
  mask_cmd->add_option("--seed", mask.seed, "RNG seed");
  mask_cmd->add_option("--dump-mask", mask.dump_mask, "Also write the 0/1 mask (1 = missing)");
  mask_cmd->add_flag("--no-header", mask.no_header, "Input has no header row");

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Estimate a correlation matrix from one masked CSV");
  est_cmd->add_option("-i,--input", est.input, "Masked data CSV")->required();
  est_cmd->add_option("-o,--output", est.output, "Correlation CSV to write")->required();
  est_cmd->add_option("-m,--method", est.method, "mean, knn, mice, em, softimpute, imputepca, dper or external");
  est_cmd->add_option("--params", est.params, "Method hyperparameters as a JSON object, e.g. {\"k\": 5}");
  est_cmd->add_option("--normalize", est.normalize, "minmax, zscore or none")
      ->check(CLI::IsMember({"minmax", "zscore", "none"}));
  est_cmd->add_option("--seed", est.seed, "RNG seed");
  est_cmd->add_option("--imputed", est.imputed, "Externally imputed CSV (method external)");
  est_cmd->add_flag("--no-header", est.no_header, "Input has no header row");
  est_cmd->add_flag("--imputed-no-header", est.imputed_no_header, "Imputed CSV has no header row");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "RMSE and local differences between two correlation CSVs");
  score_cmd->add_option("truth", score.truth, "Ground-truth correlation CSV")->required();
  score_cmd->add_option("estimate", score.estimate, "Estimated correlation CSV")->required();
  score_cmd->add_option("--abs-diff", score.abs_diff, "Write |estimate - truth| CSV");
  score_cmd->add_option("--signed-diff", score.signed_diff, "Write estimate - truth CSV");
  score_cmd->add_flag("--json", score.json, "Print full-precision JSON instead of the summary line");

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Re-render figures from a report JSON");
  render_cmd->add_option("report", render.report, "report.json from a previous run")->required();
  render_cmd->add_option("--output-dir", render.output_dir, "Directory for the SVGs (default: next to the report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) do_run(run);
    else if (*mask_cmd) do_mask(mask);
    else if (*est_cmd) do_estimate(est);
    else if (*score_cmd) do_score(score);
    else if (*render_cmd) do_render(render);
  } catch (const Failure& f) {
    const char* msg = cg_last_error();
    if (msg && *msg) std::fprintf(stderr, "corrgap: error: %s\n", msg);
    return static_cast<int>(f.status);
  }
  return 0;
}
