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

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace corrgap {

namespace {

double masked_residual_sq(const Dataset& ds, const Eigen::MatrixXd& z) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      if (ds.observed()(i, j)) {
        const double r = ds.values()(i, j) - z(i, j);
        s += r * r;
      }
  return s;
}

}  // namespace

SoftImputeResult impute_softimpute_traced(const Dataset& ds, const SoftImputeParams& params) {
  if (!(params.lambda_frac >= 0.0 && params.lambda_frac < 1.0)) {
    throw ConfigError("SoftImpute: lambda_frac must lie in [0, 1), got " + std::to_string(params.lambda_frac));
  }
  if (params.max_iter < 1) throw ConfigError("SoftImpute: max_iter must be at least 1");
  if (params.max_rank < 0) throw ConfigError("SoftImpute: max_rank must be non-negative");

  const auto means = detail::observed_means(ds, 1, "SoftImpute");
  Eigen::MatrixXd z = detail::mean_filled(ds, means);

  SoftImputeResult res;
  res.completed.source_method = "softimpute";
  Eigen::BDCSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s0 = svd.singularValues();
  res.lambda = params.lambda_frac * (s0.size() > 0 ? s0(0) : 0.0);
  res.objective_trace.push_back(0.5 * masked_residual_sq(ds, z) + res.lambda * s0.sum());

  if (ds.fully_observed()) {
    res.completed.values = ds.values();
    return res;
  }

  res.completed.converged = false;
  Eigen::MatrixXd fill = z;
  for (int it = 0; it < params.max_iter; ++it) {
    check_deadline();
    fill = z;
    detail::restore_observed(ds, fill);
    svd.compute(fill, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = (svd.singularValues().array() - res.lambda).max(0.0);
    if (params.max_rank > 0 && s.size() > params.max_rank) s.tail(s.size() - params.max_rank).setZero();
    Eigen::MatrixXd next = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();

    res.objective_trace.push_back(0.5 * masked_residual_sq(ds, next) + res.lambda * s.sum());
    const double denom = std::max(z.norm(), 1e-300);
    const double change = (next - z).norm() / denom;
    z = std::move(next);
    res.completed.iterations = it + 1;
    if (change < params.tol) {
      res.completed.converged = true;
      break;
    }
  }
  detail::restore_observed(ds, z);
  res.completed.values = std::move(z);
  return res;
}

CompleteMatrix impute_softimpute(const Dataset& ds, const SoftImputeParams& params) {
  return impute_softimpute_traced(ds, params).completed;
}

CompleteMatrix impute_pca(const Dataset& ds, const PcaParams& params) {
  const auto n = static_cast<int>(ds.rows());
  const auto d = static_cast<int>(ds.cols());
  const int r = params.n_components > 0 ? params.n_components : std::max(1, std::min(d - 1, 5));
  if (r < 1 || r > std::min(n - 1, d)) {
    throw ConfigError("ImputePCA: n_components must lie in [1, " + std::to_string(std::min(n - 1, d)) + "], got " +
                      std::to_string(r));
  }
  if (params.max_iter < 1) throw ConfigError("ImputePCA: max_iter must be at least 1");
  const auto means = detail::observed_means(ds, 1, "ImputePCA");
  Eigen::MatrixXd x = detail::mean_filled(ds, means);
  CompleteMatrix res{x, "imputepca", true, 0};
  if (ds.fully_observed()) return res;

  res.converged = false;
  Eigen::BDCSVD<Eigen::MatrixXd> svd;
  for (int it = 0; it < params.max_iter; ++it) {
    check_deadline();
    const Eigen::RowVectorXd mu = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mu;
    svd.compute(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd recon = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
                                      svd.matrixV().leftCols(r).transpose() +
                                  Eigen::MatrixXd::Ones(x.rows(), 1) * mu;
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (!ds.observed()(i, j)) {
          max_change = std::max(max_change, std::abs(recon(i, j) - x(i, j)));
          x(i, j) = recon(i, j);
        }
    res.iterations = it + 1;
    if (max_change < params.tol) {
      res.converged = true;
      break;
    }
  }
  res.values = std::move(x);
  return res;
}

}  // namespace corrgap
