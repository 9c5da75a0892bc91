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

#include "corrgap/matrix_types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace corrgap {

struct ImageShape {
  std::size_t height = 0;
  std::size_t width = 0;

  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

/// Parses "HxW" (e.g. "28x28").
ImageShape parse_image_shape(const std::string& text);

/// n x d numeric table with an explicit observedness mask.
///
/// Cells whose mask entry is false are missing; their numeric payload is
/// unspecified (the library stores NaN) and every downstream computation
/// ignores them. Instances are immutable once constructed.
class Dataset {
 public:
  Dataset() = default;
  /// Throws DataError when dimensions disagree or image_shape does not
  /// multiply to the feature count. Empty feature_names are generated as
  /// "f0".."f{d-1}".
  Dataset(Eigen::MatrixXd values, Mask observed, std::vector<std::string> feature_names = {},
          std::optional<ImageShape> image_shape = std::nullopt);

  /// Fully observed dataset.
  static Dataset complete(Eigen::MatrixXd values, std::vector<std::string> feature_names = {});

  [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  [[nodiscard]] std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
  [[nodiscard]] const Eigen::MatrixXd& values() const { return values_; }
  [[nodiscard]] const Mask& observed() const { return observed_; }
  [[nodiscard]] bool is_observed(std::size_t i, std::size_t j) const {
    return observed_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  [[nodiscard]] double value(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  [[nodiscard]] const std::vector<std::string>& feature_names() const { return feature_names_; }
  [[nodiscard]] const std::optional<ImageShape>& image_shape() const { return image_shape_; }

  [[nodiscard]] bool fully_observed() const { return observed_.all(); }
  [[nodiscard]] std::size_t observed_count(std::size_t feature) const;

  [[nodiscard]] Dataset with_image_shape(std::optional<ImageShape> shape) const;
  /// Same feature names and image shape, new payload and mask.
  [[nodiscard]] Dataset with_cells(Eigen::MatrixXd values, Mask observed) const;

 private:
  Eigen::MatrixXd values_;
  Mask observed_;
  std::vector<std::string> feature_names_;
  std::optional<ImageShape> image_shape_;
};

/// Reads a numeric CSV. Empty cells and "NaN" (any case) are missing.
Dataset load_csv(const std::filesystem::path& path, bool has_header);
Dataset parse_csv(const std::string& text, bool has_header);

/// Writes a header row of feature names, then one line per row. Values use
/// round-trip precision; missing cells are written as "NaN".
void write_csv(const std::filesystem::path& path, const Dataset& ds);
std::string format_csv(const Dataset& ds);

/// Writes the observedness mask as 0/1 (1 = missing) with the same header.
void write_mask_csv(const std::filesystem::path& path, const Dataset& ds);

enum class NormalizationMode { MinMax01, ZScore, None };

NormalizationMode parse_normalization_mode(const std::string& text);
const char* to_string(NormalizationMode mode);

/// Fitted per-feature parameters: (min, max) for MinMax01, (mean, std) for
/// ZScore, (0, 1) for None.
struct NormalizationSpec {
  NormalizationMode mode = NormalizationMode::None;
  std::vector<std::pair<double, double>> per_feature_params;
};

/// Fits statistics on observed cells only. Missing cells stay missing.
std::pair<Dataset, NormalizationSpec> normalize(const Dataset& ds, NormalizationMode mode);

/// Applies an already-fitted spec to observed cells.
Dataset apply_normalization(const Dataset& ds, const NormalizationSpec& spec);
Dataset invert_normalization(const Dataset& ds, const NormalizationSpec& spec);

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  ///< maximum-likelihood (divide by n)
};

/// Mean and ML covariance of a fully observed dataset.
Moments complete_moments(const Dataset& ds);

/// ML covariance of a complete matrix (rows are samples).
Moments matrix_moments(const Eigen::MatrixXd& x);

}  // namespace corrgap
