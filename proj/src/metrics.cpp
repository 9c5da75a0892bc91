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

#include "corrgap/metrics.hpp"

#include "corrgap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace corrgap {
namespace {

void require_same_shape(const MaskedMatrix& a, const MaskedMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DataError("matrix shapes differ: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

template <typename Op>
MaskedMatrix cellwise(const CorrelationMatrix& est, const CorrelationMatrix& truth, Op op) {
  require_same_shape(est, truth);
  Mask nulls = est.null_mask || truth.null_mask;
  Eigen::MatrixXd out(est.rows(), est.cols());
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      out(i, j) = nulls(i, j) ? std::numeric_limits<double>::quiet_NaN() : op(est.values(i, j) - truth.values(i, j));
  return MaskedMatrix(std::move(out), std::move(nulls));
}

}  // namespace

RmseResult rmse_corr_detail(const CorrelationMatrix& est, const CorrelationMatrix& truth) {
  require_same_shape(est, truth);
  RmseResult r;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < est.cols(); ++j)
    for (Eigen::Index i = 0; i < est.rows(); ++i) {
      if (est.null_mask(i, j) || truth.null_mask(i, j)) continue;
      const double diff = est.values(i, j) - truth.values(i, j);
      sum += diff * diff;
      ++r.valid_cells;
    }
  if (r.valid_cells == 0) throw DataError("RMSE undefined: no cell is non-null in both matrices");
  r.rmse = std::sqrt(sum / static_cast<double>(r.valid_cells));
  return r;
}

double rmse_corr(const CorrelationMatrix& est, const CorrelationMatrix& truth) {
  return rmse_corr_detail(est, truth).rmse;
}

MaskedMatrix local_abs_diff(const CorrelationMatrix& est, const CorrelationMatrix& truth) {
  return cellwise(est, truth, [](double d) { return std::abs(d); });
}

MaskedMatrix local_signed_diff(const CorrelationMatrix& est, const CorrelationMatrix& truth) {
  return cellwise(est, truth, [](double d) { return d; });
}

double max_abs(const MaskedMatrix& m) {
  double out = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!m.null_mask(i, j)) out = std::max(out, std::abs(m.values(i, j)));
  return out;
}

std::vector<int> dense_rank(const std::vector<double>& values, bool ascending) {
  if (values.empty()) throw DataError("dense_rank: empty input");
  for (double v : values)
    if (std::isnan(v)) throw DataError("dense_rank: NaN in input");
  std::vector<double> distinct(values);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> ranks;
  ranks.reserve(values.size());
  const auto k = static_cast<int>(distinct.size());
  for (double v : values) {
    const auto below = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin());
    ranks.push_back(ascending ? below + 1 : k - below);
  }
  return ranks;
}

bool MethodResult::ok_at(double rate) const {
  auto it = per_rate.find(rate);
  return it != per_rate.end() && it->second.ok();
}

std::vector<MethodResult> order_methods(std::vector<MethodResult> results, double max_rate) {
  std::vector<double> rmse;
  for (const auto& r : results) {
    if (!r.ok_at(max_rate)) {
      throw DataError("method '" + r.method + "' has no result at the highest rate " + std::to_string(max_rate));
    }
    rmse.push_back(r.per_rate.at(max_rate).rmse);
  }
  if (results.empty()) return results;
  const auto ranks = dense_rank(rmse, true);
  for (std::size_t i = 0; i < results.size(); ++i) results[i].rank_at_max_rate = ranks[i];
  std::stable_sort(results.begin(), results.end(), [max_rate](const MethodResult& a, const MethodResult& b) {
    const double ra = a.per_rate.at(max_rate).rmse;
    const double rb = b.per_rate.at(max_rate).rmse;
    if (ra != rb) return ra > rb;
    return a.method < b.method;
  });
  return results;
}

std::vector<MethodResult> order_methods(std::vector<MethodResult> results) {
  double max_rate = -std::numeric_limits<double>::infinity();
  for (const auto& r : results)
    for (const auto& [rate, _] : r.per_rate) max_rate = std::max(max_rate, rate);
  return order_methods(std::move(results), max_rate);
}

void assign_rate_ranks(std::vector<MethodResult>& results) {
  std::set<double> rates;
  for (const auto& r : results)
    for (const auto& [rate, _] : r.per_rate) rates.insert(rate);
  for (double rate : rates) {
    std::vector<double> vals;
    std::vector<RateResult*> slots;
    for (auto& r : results) {
      auto it = r.per_rate.find(rate);
      if (it == r.per_rate.end()) continue;
      if (!it->second.ok()) {
        it->second.rank = 0;
        continue;
      }
      vals.push_back(it->second.rmse);
      slots.push_back(&it->second);
    }
    if (vals.empty()) continue;
    const auto ranks = dense_rank(vals, true);
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i]->rank = ranks[i];
  }
}

}  // namespace corrgap
