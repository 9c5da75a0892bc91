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

#pragma once

#include "corrgap/dataset.hpp"
#include "corrgap/estimators.hpp"
#include "corrgap/metrics.hpp"
#include "corrgap/missingness.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace corrgap {

inline constexpr const char* kToolVersion = "0.1.0";

enum class DiffDomain { FigureMax, Fixed };

struct FigureOptions {
  int cell_px = 12;
  DiffDomain diff_domain = DiffDomain::FigureMax;
};

/// Experiment description. Loaded from JSON; unknown keys are rejected.
///
///   {
///     "dataset": "iris.csv",            // required
///     "has_header": true,
///     "image_shape": "28x28",
///     "normalization": "minmax" | "zscore" | "none",
///     "normalize_on_complete": false,
///     "pattern": {"type": "random", "rates": [0.1, 0.2]}
///              | {"type": "monotone", "block_fractions": [0.4, 0.5],
///                 "affected_row_fraction": 0.5, "corner": "bottom-right"},
///     "methods": [{"method": "knn", "label": "KNNI", "k": 5}, ...],
///     "seed": 42,
///     "output_dir": "out",
///     "figures": {"cell_px": 12, "diff_domain": "figure_max" | "fixed"},
///     "workers": 4,
///     "timeout_seconds": 600
///   }
///
/// Relative paths resolve against the config file's directory.
struct ExperimentConfig {
  std::filesystem::path dataset;
  bool has_header = true;
  std::optional<ImageShape> image_shape;
  NormalizationMode normalization = NormalizationMode::MinMax01;
  bool normalize_on_complete = false;
  MissingPattern pattern = MissingPattern::RandomRate;
  /// Missing rates (random) or block fractions (monotone), strictly increasing.
  std::vector<double> rates;
  double affected_row_fraction = 0.5;
  Corner corner = Corner::BottomRight;
  std::vector<MethodConfig> methods;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "corrgap-out";
  FigureOptions figures;
  int workers = 0;  ///< 0 = hardware concurrency
  double timeout_seconds = 600.0;
  /// Directory relative paths were resolved against.
  std::filesystem::path base_dir;
};

ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Parses one method entry: {"method": "...", "label": "...", <params>}.
MethodConfig parse_method_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json method_config_to_json(const MethodConfig& m);

struct ExperimentReport {
  ExperimentConfig config;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::string> feature_names;
  CorrelationMatrix truth;
  /// Panel order: descending RMSE at the largest rate, then methods that
  /// failed there.
  std::vector<MethodResult> results;
  std::map<std::string, MethodConfig> method_configs;
  std::vector<std::pair<double, double>> realized_missing_rates;
  std::map<std::string, std::string> figures;  ///< figure key -> file name
  std::map<std::string, double> diff_domains;
};

/// Loads data, applies missingness per rate, runs every method, scores,
/// and writes CSV artifacts, five heatmap figures, the RMSE line chart and
/// report.json into config.output_dir. Estimator failures are recorded in
/// the report; I/O and config problems throw.
ExperimentReport run_pipeline(const ExperimentConfig& config);

nlohmann::json report_to_json(const ExperimentReport& report);

/// Re-renders all figures from a report.json and the CSVs next to it.
/// Returns the written file paths.
std::vector<std::filesystem::path> render_report(const std::filesystem::path& report_path,
                                                 const std::filesystem::path& output_dir);

/// CSV persistence of correlation matrices (null cells as NaN).
void write_correlation_csv(const std::filesystem::path& path, const CorrelationMatrix& m,
                           const std::vector<std::string>& names);
CorrelationMatrix load_correlation_csv(const std::filesystem::path& path);

}  // namespace corrgap
