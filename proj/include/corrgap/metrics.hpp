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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace corrgap {

struct RmseResult {
  double rmse = 0.0;
  std::size_t valid_cells = 0;  ///< |V|: cells non-null in both matrices
};

/// Root-mean-square difference over cells that are non-null in both
/// matrices (off-diagonal pairs count twice). Throws DataError when no
/// such cell exists or the shapes differ.
RmseResult rmse_corr_detail(const CorrelationMatrix& est, const CorrelationMatrix& truth);
double rmse_corr(const CorrelationMatrix& est, const CorrelationMatrix& truth);

/// |est - truth| on jointly non-null cells; null where either input is.
MaskedMatrix local_abs_diff(const CorrelationMatrix& est, const CorrelationMatrix& truth);
/// est - truth on jointly non-null cells; null where either input is.
MaskedMatrix local_signed_diff(const CorrelationMatrix& est, const CorrelationMatrix& truth);

/// Largest |value| over non-null cells, 0 when there are none.
double max_abs(const MaskedMatrix& m);

/// Dense ranks: 1 + number of distinct values strictly preceding each value
/// in the requested order. Throws DataError on NaN or empty input.
std::vector<int> dense_rank(const std::vector<double>& values, bool ascending = true);

struct RateResult {
  std::optional<CorrelationMatrix> correlation;
  double rmse = 0.0;
  std::size_t valid_cells = 0;
  int rank = 0;  ///< dense rank among methods at this rate
  double wall_time = 0.0;
  bool converged = true;
  int iterations = 0;
  std::string error;  ///< non-empty when the method failed at this rate

  [[nodiscard]] bool ok() const { return error.empty(); }
};

struct MethodResult {
  std::string method;
  std::map<double, RateResult> per_rate;
  int rank_at_max_rate = 0;

  [[nodiscard]] bool ok_at(double rate) const;
};

/// Sorts by RMSE at `max_rate`, descending; ties by method name. Assigns
/// rank_at_max_rate by ascending dense rank. Throws DataError naming the
/// first method without a successful entry at `max_rate`.
std::vector<MethodResult> order_methods(std::vector<MethodResult> results, double max_rate);
/// Uses the largest rate present in any result.
std::vector<MethodResult> order_methods(std::vector<MethodResult> results);

/// Fills RateResult::rank for every rate from the successful entries.
void assign_rate_ranks(std::vector<MethodResult>& results);

}  // namespace corrgap
