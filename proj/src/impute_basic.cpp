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
#include <utility>
#include <vector>

namespace corrgap {
namespace detail {

Eigen::VectorXd observed_means(const Dataset& ds, std::size_t min_observed, const char* who) {
  Eigen::VectorXd means(ds.cols());
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    const auto cnt = ds.observed_count(j);
    if (cnt < min_observed) {
      throw DataError(std::string(who) + ": feature '" + ds.feature_names()[j] + "' (column " + std::to_string(j) +
                      ") has " + std::to_string(cnt) + " observed cells, needs at least " +
                      std::to_string(min_observed));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < ds.rows(); ++i)
      if (ds.is_observed(i, j)) sum += ds.value(i, j);
    means(idx(j)) = sum / static_cast<double>(cnt);
  }
  return means;
}

Eigen::MatrixXd mean_filled(const Dataset& ds, const Eigen::VectorXd& means) {
  Eigen::MatrixXd x = ds.values();
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (!ds.observed()(i, j)) x(i, j) = means(j);
  return x;
}

void restore_observed(const Dataset& ds, Eigen::MatrixXd& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (ds.observed()(i, j)) x(i, j) = ds.values()(i, j);
}

}  // namespace detail

using detail::idx;

CompleteMatrix impute_mean(const Dataset& ds) {
  const auto means = detail::observed_means(ds, 1, "mean imputation");
  return CompleteMatrix{detail::mean_filled(ds, means), "mean", true, 0};
}

CompleteMatrix impute_knn(const Dataset& ds, const KnnParams& params) {
  if (params.k < 1) throw ConfigError("KNN imputation: k must be at least 1, got " + std::to_string(params.k));
  const auto means = detail::observed_means(ds, 1, "KNN imputation");
  const std::size_t n = ds.rows();
  const std::size_t d = ds.cols();
  const auto& obs = ds.observed();
  const auto& val = ds.values();
  Eigen::MatrixXd out = detail::mean_filled(ds, means);

  // Row-major copies keep the distance loop contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> v = val;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> o = obs;

  std::vector<std::pair<double, std::size_t>> neighbours;
  neighbours.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (o.row(idx(r)).all()) continue;
    check_deadline();
    neighbours.clear();
    for (std::size_t s = 0; s < n; ++s) {
      if (s == r) continue;
      double sum = 0.0;
      std::size_t shared = 0;
      for (std::size_t j = 0; j < d; ++j) {
        if (o(idx(r), idx(j)) && o(idx(s), idx(j))) {
          const double diff = v(idx(r), idx(j)) - v(idx(s), idx(j));
          sum += diff * diff;
          ++shared;
        }
      }
      if (shared == 0) continue;
      neighbours.emplace_back(std::sqrt(static_cast<double>(d) / static_cast<double>(shared) * sum), s);
    }
    std::sort(neighbours.begin(), neighbours.end());
    for (std::size_t j = 0; j < d; ++j) {
      if (o(idx(r), idx(j))) continue;
      double sum = 0.0;
      int used = 0;
      for (const auto& [dist, s] : neighbours) {
        if (!o(idx(s), idx(j))) continue;
        sum += v(idx(s), idx(j));
        if (++used == params.k) break;
      }
      if (used > 0) out(idx(r), idx(j)) = sum / used;
    }
  }
  return CompleteMatrix{std::move(out), "knn", true, 0};
}

CompleteMatrix merge_external_imputed(const Dataset& imputed, const Dataset& ds, const std::string& method_name) {
  if (imputed.rows() != ds.rows() || imputed.cols() != ds.cols()) {
    throw DataError("external imputation '" + method_name + "' has shape " + std::to_string(imputed.rows()) + "x" +
                    std::to_string(imputed.cols()) + ", expected " + std::to_string(ds.rows()) + "x" +
                    std::to_string(ds.cols()));
  }
  if (!imputed.fully_observed()) {
    for (std::size_t i = 0; i < imputed.rows(); ++i)
      for (std::size_t j = 0; j < imputed.cols(); ++j)
        if (!imputed.is_observed(i, j)) {
          throw DataError("external imputation '" + method_name + "' still has a missing cell at row " +
                          std::to_string(i) + ", column " + std::to_string(j));
        }
  }
  Eigen::MatrixXd out = imputed.values();
  detail::restore_observed(ds, out);
  return CompleteMatrix{std::move(out), method_name, true, 0};
}

CompleteMatrix import_external_imputed(const std::filesystem::path& path, const Dataset& ds,
                                       const std::string& method_name, bool has_header) {
  return merge_external_imputed(load_csv(path, has_header), ds, method_name);
}

}  // namespace corrgap
