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

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

namespace corrgap {

using detail::idx;

namespace {

// Rows sharing one observedness pattern share every factorization.
struct PatternGroup {
  std::vector<Eigen::Index> observed;
  std::vector<Eigen::Index> missing;
  std::vector<Eigen::Index> rows;
};

std::vector<PatternGroup> group_patterns(const Dataset& ds) {
  std::map<std::vector<bool>, std::size_t> index;
  std::vector<PatternGroup> groups;
  const auto d = static_cast<Eigen::Index>(ds.cols());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(ds.rows()); ++i) {
    std::vector<bool> key(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) key[static_cast<std::size_t>(j)] = ds.observed()(i, j);
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) {
      PatternGroup g;
      for (Eigen::Index j = 0; j < d; ++j) (key[static_cast<std::size_t>(j)] ? g.observed : g.missing).push_back(j);
      groups.push_back(std::move(g));
    }
    groups[it->second].rows.push_back(i);
  }
  return groups;
}

Eigen::MatrixXd sub(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& r, const std::vector<Eigen::Index>& c) {
  Eigen::MatrixXd out(r.size(), c.size());
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = 0; b < c.size(); ++b) out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(r[a], c[b]);
  return out;
}

// Cholesky of the observed block, retrying once with a ridge.
Eigen::LLT<Eigen::MatrixXd> factor_observed(const Eigen::MatrixXd& soo, double ridge, Eigen::Index row) {
  Eigen::LLT<Eigen::MatrixXd> llt(soo);
  if (llt.info() == Eigen::Success) return llt;
  Eigen::MatrixXd reg = soo;
  reg.diagonal().array() += ridge;
  llt.compute(reg);
  if (llt.info() != Eigen::Success) {
    throw NumericError("EM: observed covariance block is singular for row " + std::to_string(row));
  }
  return llt;
}

struct EStep {
  Eigen::MatrixXd filled;
  Eigen::MatrixXd cond_cov_sum;  // sum over rows of the conditional covariance blocks
  double loglik = 0.0;
};

EStep e_step(const Dataset& ds, const std::vector<PatternGroup>& groups, const Eigen::VectorXd& mu,
             const Eigen::MatrixXd& sigma, double ridge) {
  const auto d = static_cast<Eigen::Index>(ds.cols());
  EStep out;
  out.filled = ds.values();
  out.cond_cov_sum = Eigen::MatrixXd::Zero(d, d);
  const double log2pi = std::log(2.0 * std::numbers::pi);

  for (const auto& g : groups) {
    const auto no = static_cast<Eigen::Index>(g.observed.size());
    const auto nm = static_cast<Eigen::Index>(g.missing.size());
    const auto count = static_cast<double>(g.rows.size());
    if (no == 0) {
      for (auto i : g.rows)
        for (auto j : g.missing) out.filled(i, j) = mu(j);
      out.cond_cov_sum += count * sigma;
      continue;
    }
    const Eigen::MatrixXd soo = sub(sigma, g.observed, g.observed);
    const auto llt = factor_observed(soo, ridge, g.rows.front());
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

    Eigen::MatrixXd resid(no, static_cast<Eigen::Index>(g.rows.size()));
    for (std::size_t r = 0; r < g.rows.size(); ++r)
      for (Eigen::Index a = 0; a < no; ++a)
        resid(a, static_cast<Eigen::Index>(r)) = ds.values()(g.rows[r], g.observed[a]) - mu(g.observed[a]);
    const Eigen::MatrixXd solved = llt.solve(resid);
    out.loglik += -0.5 * (count * (static_cast<double>(no) * log2pi + logdet) +
                          (resid.array() * solved.array()).sum());

    if (nm == 0) continue;
    const Eigen::MatrixXd smo = sub(sigma, g.missing, g.observed);
    const Eigen::MatrixXd cond_mean_shift = smo * solved;  // nm x rows
    for (std::size_t r = 0; r < g.rows.size(); ++r)
      for (Eigen::Index a = 0; a < nm; ++a)
        out.filled(g.rows[r], g.missing[a]) = mu(g.missing[a]) + cond_mean_shift(a, static_cast<Eigen::Index>(r));
    const Eigen::MatrixXd cmm = sub(sigma, g.missing, g.missing) - smo * llt.solve(smo.transpose());
    for (Eigen::Index a = 0; a < nm; ++a)
      for (Eigen::Index b = 0; b < nm; ++b) out.cond_cov_sum(g.missing[a], g.missing[b]) += count * cmm(a, b);
  }
  return out;
}

void symmetrize(Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
}

}  // namespace

double observed_loglik(const Dataset& ds, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  return e_step(ds, group_patterns(ds), mean, cov, 0.0).loglik;
}

EmResult em_estimate(const Dataset& ds, const EmParams& params) {
  if (params.max_iter < 1) throw ConfigError("EM: max_iter must be at least 1");
  const auto n = static_cast<double>(ds.rows());
  const auto groups = group_patterns(ds);

  Eigen::VectorXd mu = detail::observed_means(ds, 2, "EM");
  Eigen::MatrixXd sigma = matrix_moments(detail::mean_filled(ds, mu)).cov;
  sigma.diagonal().array() += params.ridge;

  EmResult result;
  result.completed.source_method = "em";
  result.completed.converged = false;

  EStep step = e_step(ds, groups, mu, sigma, params.ridge);
  result.loglik_trace.push_back(step.loglik);
  for (int it = 0; it < params.max_iter; ++it) {
    check_deadline();
    // M-step
    mu = step.filled.colwise().mean().transpose();
    const Eigen::MatrixXd centered = step.filled.rowwise() - mu.transpose();
    sigma = (centered.transpose() * centered + step.cond_cov_sum) / n;
    symmetrize(sigma);

    const double prev = step.loglik;
    step = e_step(ds, groups, mu, sigma, params.ridge);
    result.loglik_trace.push_back(step.loglik);
    result.completed.iterations = it + 1;
    const double denom = std::max(std::abs(prev), 1e-300);
    if (std::abs(step.loglik - prev) / denom < params.tol) {
      result.completed.converged = true;
      break;
    }
  }

  result.completed.values = std::move(step.filled);
  result.estimate.mean = mu;
  result.estimate.cov = sigma;
  result.estimate.null_mask = Mask::Constant(sigma.rows(), sigma.cols(), false);
  result.estimate.method = "em";
  return result;
}

}  // namespace corrgap
