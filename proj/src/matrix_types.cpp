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

#include "corrgap/matrix_types.hpp"

#include "corrgap/error.hpp"

#include <string>
#include <utility>

namespace corrgap {

MaskedMatrix::MaskedMatrix(Eigen::MatrixXd v, Mask nulls) : values(std::move(v)), null_mask(std::move(nulls)) {
  if (values.rows() != null_mask.rows() || values.cols() != null_mask.cols()) {
    throw DataError("masked matrix: value and null mask dimensions differ");
  }
}

std::size_t MaskedMatrix::non_null_count() const {
  return static_cast<std::size_t>((!null_mask).count());
}

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd v, Mask nulls) : MaskedMatrix(std::move(v), std::move(nulls)) {
  if (values.rows() != values.cols()) {
    throw DataError("correlation matrix must be square, got " + std::to_string(values.rows()) + "x" +
                    std::to_string(values.cols()));
  }
}

}  // namespace corrgap
