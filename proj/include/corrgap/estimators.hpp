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

#include "corrgap/dataset.hpp"
#include "corrgap/matrix_types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace corrgap {

/// Output of an imputer. Cells observed in the input are copied through
/// unchanged.
struct CompleteMatrix {
  Eigen::MatrixXd values;
  std::string source_method;
  bool converged = true;
  int iterations = 0;
};

/// Directly estimated second moments. Null cells mark covariance entries
/// that could not be estimated (no joint observations, zero variance).
struct CovarianceEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Mask null_mask;
  std::string method;
};

// ---------------------------------------------------------------------------
// Imputation route

CompleteMatrix impute_mean(const Dataset& ds);

struct KnnParams {
  int k = 5;
};
CompleteMatrix impute_knn(const Dataset& ds, const KnnParams& params = {});

struct MiceParams {
  int max_iter = 10;
  double tol = 1e-4;
  double ridge = 1e-6;
  std::uint64_t seed = 0;
};
CompleteMatrix impute_mice(const Dataset& ds, const MiceParams& params = {});

struct SoftImputeParams {
  double lambda_frac = 0.1;
  int max_iter = 100;
  double tol = 1e-5;
  /// Optional hard cap on the rank of each iterate (0 = no cap).
  int max_rank = 0;
};

struct SoftImputeResult {
  CompleteMatrix completed;
  double lambda = 0.0;
  /// 0.5 * ||P_obs(X - Z)||_F^2 + lambda * ||Z||_* for the starting point
  /// and after every iteration.
  std::vector<double> objective_trace;
};
SoftImputeResult impute_softimpute_traced(const Dataset& ds, const SoftImputeParams& params = {});
CompleteMatrix impute_softimpute(const Dataset& ds, const SoftImputeParams& params = {});

struct PcaParams {
  /// 0 selects min(d - 1, 5), floored at 1.
  int n_components = 0;
  int max_iter = 200;
  double tol = 1e-6;
};
CompleteMatrix impute_pca(const Dataset& ds, const PcaParams& params = {});

/// Observed cells of `ds` overwrite the values read from an externally
/// imputed CSV of the same shape.
CompleteMatrix import_external_imputed(const std::filesystem::path& path, const Dataset& ds,
                                       const std::string& method_name, bool has_header = true);
CompleteMatrix merge_external_imputed(const Dataset& imputed, const Dataset& ds,
                                      const std::string& method_name);

// ---------------------------------------------------------------------------
// Direct-estimation route

struct EmParams {
  int max_iter = 100;
  double tol = 1e-6;
  double ridge = 1e-6;
};

struct EmResult {
  CovarianceEstimate estimate;
  CompleteMatrix completed;
  /// Observed-data log-likelihood of the parameters entering each iteration,
  /// followed by that of the final parameters.
  std::vector<double> loglik_trace;
};
EmResult em_estimate(const Dataset& ds, const EmParams& params = {});

/// Observed-data Gaussian log-likelihood of (mean, cov).
double observed_loglik(const Dataset& ds, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

/// Pairwise maximum-likelihood covariance for randomly missing data.
CovarianceEstimate dper_estimate(const Dataset& ds);

/// Sufficient statistics for one DPER feature pair.
struct PairStats {
  double var_i = 0.0;  ///< ML variance of feature i over all its observed cells
  double var_j = 0.0;
  double s11 = 0.0;    ///< sums over rows where both are observed, centered
  double s22 = 0.0;    ///< at the per-feature means
  double s12 = 0.0;
  std::size_t joint = 0;
};

/// Restricted bivariate log-likelihood of the off-diagonal covariance.
double dper_pair_loglik(const PairStats& st, double sigma);

/// Maximizer of dper_pair_loglik over the open feasible interval, found
/// among the real roots of its first-order cubic. Empty when the pair has
/// no joint observations or a zero variance.
std::optional<double> dper_pair_covariance(const PairStats& st);

// ---------------------------------------------------------------------------
// Correlation

/// ML covariance of the completed data, normalized to correlations.
CorrelationMatrix correlate(const CompleteMatrix& completed);
CorrelationMatrix correlate(const CovarianceEstimate& estimate);
CorrelationMatrix correlate_covariance(const Eigen::MatrixXd& cov, const Mask& null_cov);

/// Ground truth from a fully observed dataset.
CorrelationMatrix ground_truth_correlation(const Dataset& complete);

// ---------------------------------------------------------------------------
// Method dispatch

enum class MethodKind { Mean, Knn, Mice, Em, SoftImpute, ImputePca, Dper, External };

MethodKind parse_method_kind(const std::string& text);
const char* to_string(MethodKind kind);
/// Display label used in figures ("Mean", "KNNI", "MICE", ...).
const char* default_label(MethodKind kind);

struct MethodConfig {
  MethodKind kind = MethodKind::Mean;
  std::string label;
  std::variant<std::monostate, KnnParams, MiceParams, EmParams, SoftImputeParams, PcaParams> params;
  /// External only: imputed CSV per configured rate, aligned with the rate list.
  std::vector<std::filesystem::path> external_files;
  bool external_has_header = true;
};

MethodConfig default_method_config(MethodKind kind);

struct EstimateOutcome {
  CorrelationMatrix correlation;
  std::optional<CompleteMatrix> completed;
  bool converged = true;
  int iterations = 0;
};

/// Runs one built-in method on `ds`. External methods need `external_file`.
EstimateOutcome run_method(const Dataset& ds, const MethodConfig& method, std::uint64_t seed,
                           const std::filesystem::path& external_file = {});

}  // namespace corrgap
