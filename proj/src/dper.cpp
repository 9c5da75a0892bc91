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

#include "corrgap/cubic.hpp"
#include "corrgap/error.hpp"
#include "internal.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace corrgap {

using detail::idx;

double dper_pair_loglik(const PairStats& st, double sigma) {
  const double det = st.var_i * st.var_j - sigma * sigma;
  if (!(det > 0.0)) return -std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(st.joint);
  const double quad = st.s11 * st.var_j - 2.0 * st.s12 * sigma + st.s22 * st.var_i;
  return -0.5 * m * std::log(det) - quad / (2.0 * det);
}

std::optional<double> dper_pair_covariance(const PairStats& st) {
  if (st.joint == 0 || !(st.var_i > 0.0) || !(st.var_j > 0.0)) return std::nullopt;
  const double m = static_cast<double>(st.joint);
  const double a = st.var_i;
  const double b = st.var_j;
  const double bound = std::sqrt(a * b);

  // Stationarity of the restricted likelihood:
  //   m s^3 - s12 s^2 + (s11 b + s22 a - m a b) s - s12 a b = 0
  const auto roots = solve_cubic(m, -st.s12, st.s11 * b + st.s22 * a - m * a * b, -st.s12 * a * b);

  std::optional<double> best;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (double s : roots) {
    if (!(std::abs(s) < bound)) continue;
    const double ll = dper_pair_loglik(st, s);
    const double tie = 1e-12 * std::max(1.0, std::abs(ll));
    if (!best || ll > best_ll + tie || (std::abs(ll - best_ll) <= tie && std::abs(s) < std::abs(*best))) {
      best = s;
      best_ll = ll;
    }
  }
  if (best) return best;

  // No interior stationary point: the supremum sits on the boundary of the
  // feasible interval (perfectly collinear joint sample). Take the side where
  // the quadratic form is smaller.
  const double q_plus = st.s11 * b - 2.0 * st.s12 * bound + st.s22 * a;
  const double q_minus = st.s11 * b + 2.0 * st.s12 * bound + st.s22 * a;
  if (q_plus < q_minus) return bound;
  if (q_minus < q_plus) return -bound;
  return st.s12 >= 0.0 ? bound : -bound;
}

CovarianceEstimate dper_estimate(const Dataset& ds) {
  const std::size_t n = ds.rows();
  const std::size_t d = ds.cols();
  const auto means = detail::observed_means(ds, 2, "DPER");
  const auto& obs = ds.observed();
  const auto& val = ds.values();

  CovarianceEstimate est;
  est.method = "dper";
  est.mean = means;
  est.cov = Eigen::MatrixXd::Zero(idx(d), idx(d));
  est.null_mask = Mask::Constant(idx(d), idx(d), false);

  // Centered columns with zeros at missing cells, and the mask as 0/1.
  Eigen::MatrixXd centered(idx(n), idx(d));
  Eigen::MatrixXd present(idx(n), idx(d));
  Eigen::VectorXd var(idx(d));
  for (std::size_t j = 0; j < d; ++j) {
    const auto jj = idx(j);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = idx(i);
      present(ii, jj) = obs(ii, jj) ? 1.0 : 0.0;
      centered(ii, jj) = obs(ii, jj) ? val(ii, jj) - means(jj) : 0.0;
    }
    var(jj) = centered.col(jj).squaredNorm() / static_cast<double>(ds.observed_count(j));
    est.cov(jj, jj) = var(jj);
    if (!(var(jj) > 0.0)) est.null_mask(jj, jj) = true;
  }

  // Pairwise sufficient statistics for every pair at once:
  //   joint(i,j) = sum_r P_ri P_rj,  s12(i,j) = sum_r C_ri C_rj,
  //   s11(i,j) = sum_r C_ri^2 P_rj   (and s22(i,j) = s11(j,i)).
  check_deadline();
  const Eigen::MatrixXd joint = present.transpose() * present;
  const Eigen::MatrixXd cross = centered.transpose() * centered;
  const Eigen::MatrixXd sq = centered.array().square().matrix().transpose() * present;
  check_deadline();

  for (std::size_t i = 0; i < d; ++i) {
    const auto ii = idx(i);
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto jj = idx(j);
      PairStats st;
      st.var_i = var(ii);
      st.var_j = var(jj);
      st.joint = static_cast<std::size_t>(std::llround(joint(ii, jj)));
      st.s11 = sq(ii, jj);
      st.s22 = sq(jj, ii);
      st.s12 = cross(ii, jj);
      const auto sigma = dper_pair_covariance(st);
      if (sigma) {
        est.cov(ii, jj) = est.cov(jj, ii) = *sigma;
      } else {
        est.cov(ii, jj) = est.cov(jj, ii) = std::numeric_limits<double>::quiet_NaN();
        est.null_mask(ii, jj) = est.null_mask(jj, ii) = true;
      }
    }
  }
  return est;
}

}  // namespace corrgap
