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

#include <Eigen/Dense>

#include <cstddef>

namespace corrgap {

/// Boolean cell mask. For datasets true means "observed"; for masked
/// matrices true means "null".
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// A real matrix paired with a null mask. Null cells carry NaN payloads.
struct MaskedMatrix {
  Eigen::MatrixXd values;
  Mask null_mask;

  MaskedMatrix() = default;
  MaskedMatrix(Eigen::MatrixXd v, Mask nulls);

  [[nodiscard]] Eigen::Index rows() const { return values.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return values.cols(); }
  [[nodiscard]] bool is_null(Eigen::Index i, Eigen::Index j) const { return null_mask(i, j); }
  [[nodiscard]] std::size_t non_null_count() const;
};

/// Square correlation matrix: symmetric, entries in [-1, 1], unit diagonal
/// wherever the diagonal cell is not null.
struct CorrelationMatrix : MaskedMatrix {
  CorrelationMatrix() = default;
  CorrelationMatrix(Eigen::MatrixXd v, Mask nulls);

  [[nodiscard]] Eigen::Index dim() const { return values.rows(); }
};

}  // namespace corrgap
