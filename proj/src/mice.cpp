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

#include "corrgap/estimators.hpp"

#include "corrgap/error.hpp"
#include "internal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace corrgap {

using detail::idx;

// Deterministic chained equations: every feature with missing cells is
// regressed (ridge, unpenalized intercept) on all other features, using the
// rows where it was originally observed, and its missing cells are replaced
// by the regression means.
CompleteMatrix impute_mice(const Dataset& ds, const MiceParams& params) {
  if (params.max_iter < 1) throw ConfigError("MICE: max_iter must be at least 1");
  if (!(params.ridge >= 0.0)) throw ConfigError("MICE: ridge must be non-negative");
  const auto means = detail::observed_means(ds, 2, "MICE");
  const std::size_t n = ds.rows();
  const std::size_t d = ds.cols();
  Eigen::MatrixXd x = detail::mean_filled(ds, means);

  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < d; ++j)
    if (ds.observed_count(j) < n) order.push_back(j);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ds.observed_count(a) > ds.observed_count(b); });

  CompleteMatrix result{x, "mice", true, 0};
  if (order.empty() || d == 1) {
    result.values = std::move(x);
    return result;
  }

  result.converged = false;
  for (int sweep = 0; sweep < params.max_iter; ++sweep) {
    check_deadline();
    double max_change = 0.0;
    for (std::size_t target : order) {
      std::vector<std::size_t> predictors(d - 1);
      for (std::size_t j = 0, p = 0; j < d; ++j)
        if (j != target) predictors[p++] = j;
      std::vector<std::size_t> train, fill;
      for (std::size_t i = 0; i < n; ++i) (ds.is_observed(i, target) ? train : fill).push_back(i);

      const auto m = static_cast<Eigen::Index>(train.size());
      const auto p = static_cast<Eigen::Index>(predictors.size());
      Eigen::MatrixXd xt(m, p);
      Eigen::VectorXd yt(m);
      for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < p; ++c) xt(r, c) = x(idx(train[r]), idx(predictors[c]));
        yt(r) = x(idx(train[r]), idx(target));
      }
      const Eigen::RowVectorXd xbar = xt.colwise().mean();
      const double ybar = yt.mean();
      xt.rowwise() -= xbar;
      yt.array() -= ybar;
      Eigen::MatrixXd gram = xt.transpose() * xt;
      gram.diagonal().array() += params.ridge;
      const Eigen::VectorXd beta = gram.ldlt().solve(xt.transpose() * yt);
      if (!beta.allFinite()) {
        throw NumericError("MICE: regression for feature '" + ds.feature_names()[target] + "' is singular");
      }
      for (std::size_t i : fill) {
        double pred = ybar;
        for (Eigen::Index c = 0; c < p; ++c) pred += (x(idx(i), idx(predictors[c])) - xbar(c)) * beta(c);
        max_change = std::max(max_change, std::abs(pred - x(idx(i), idx(target))));
        x(idx(i), idx(target)) = pred;
      }
    }
    result.iterations = sweep + 1;
    if (max_change < params.tol) {
      result.converged = true;
      break;
    }
  }
  result.values = std::move(x);
  return result;
}

}  // namespace corrgap
