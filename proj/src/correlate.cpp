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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace corrgap {

namespace {
constexpr double kMinVariance = 1e-12;
}

CorrelationMatrix correlate_covariance(const Eigen::MatrixXd& cov, const Mask& null_cov) {
  if (cov.rows() != cov.cols()) throw DataError("covariance matrix must be square");
  if (null_cov.rows() != cov.rows() || null_cov.cols() != cov.cols()) {
    throw DataError("covariance null mask does not match the covariance matrix");
  }
  const Eigen::Index d = cov.rows();
  std::vector<bool> defined(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    const double v = cov(i, i);
    defined[static_cast<std::size_t>(i)] = !null_cov(i, i) && std::isfinite(v) && v >= kMinVariance;
  }
  Eigen::MatrixXd rho = Eigen::MatrixXd::Constant(d, d, std::numeric_limits<double>::quiet_NaN());
  Mask nulls = Mask::Constant(d, d, true);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!defined[static_cast<std::size_t>(i)]) continue;
    rho(i, i) = 1.0;
    nulls(i, i) = false;
    for (Eigen::Index j = i + 1; j < d; ++j) {
      if (!defined[static_cast<std::size_t>(j)] || null_cov(i, j) || null_cov(j, i)) continue;
      const double c = cov(i, j);
      if (!std::isfinite(c)) continue;
      const double r = std::clamp(c / std::sqrt(cov(i, i) * cov(j, j)), -1.0, 1.0);
      rho(i, j) = rho(j, i) = r;
      nulls(i, j) = nulls(j, i) = false;
    }
  }
  return CorrelationMatrix(std::move(rho), std::move(nulls));
}

CorrelationMatrix correlate(const CompleteMatrix& completed) {
  const auto m = matrix_moments(completed.values);
  return correlate_covariance(m.cov, Mask::Constant(m.cov.rows(), m.cov.cols(), false));
}

CorrelationMatrix correlate(const CovarianceEstimate& estimate) {
  return correlate_covariance(estimate.cov, estimate.null_mask);
}

CorrelationMatrix ground_truth_correlation(const Dataset& complete) {
  const auto m = complete_moments(complete);
  return correlate_covariance(m.cov, Mask::Constant(m.cov.rows(), m.cov.cols(), false));
}

MethodKind parse_method_kind(const std::string& text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "mean") return MethodKind::Mean;
  if (t == "knn" || t == "knni") return MethodKind::Knn;
  if (t == "mice") return MethodKind::Mice;
  if (t == "em") return MethodKind::Em;
  if (t == "softimpute") return MethodKind::SoftImpute;
  if (t == "imputepca" || t == "pca") return MethodKind::ImputePca;
  if (t == "dper") return MethodKind::Dper;
  if (t == "external") return MethodKind::External;
  throw ConfigError("unknown method '" + text +
                    "' (expected mean, knn, mice, em, softimpute, imputepca, dper or external)");
}

const char* to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::Mean: return "mean";
    case MethodKind::Knn: return "knn";
    case MethodKind::Mice: return "mice";
    case MethodKind::Em: return "em";
    case MethodKind::SoftImpute: return "softimpute";
    case MethodKind::ImputePca: return "imputepca";
    case MethodKind::Dper: return "dper";
    case MethodKind::External: return "external";
  }
  return "?";
}

const char* default_label(MethodKind kind) {
  switch (kind) {
    case MethodKind::Mean: return "Mean";
    case MethodKind::Knn: return "KNNI";
    case MethodKind::Mice: return "MICE";
    case MethodKind::Em: return "EM";
    case MethodKind::SoftImpute: return "SoftImpute";
    case MethodKind::ImputePca: return "ImputePCA";
    case MethodKind::Dper: return "DPER";
    case MethodKind::External: return "External";
  }
  return "?";
}

MethodConfig default_method_config(MethodKind kind) {
  MethodConfig m;
  m.kind = kind;
  m.label = default_label(kind);
  switch (kind) {
    case MethodKind::Knn: m.params = KnnParams{}; break;
    case MethodKind::Mice: m.params = MiceParams{}; break;
    case MethodKind::Em: m.params = EmParams{}; break;
    case MethodKind::SoftImpute: m.params = SoftImputeParams{}; break;
    case MethodKind::ImputePca: m.params = PcaParams{}; break;
    default: break;
  }
  return m;
}

namespace {

template <typename P>
P params_or_default(const MethodConfig& m) {
  if (const auto* p = std::get_if<P>(&m.params)) return *p;
  return P{};
}

EstimateOutcome from_completed(CompleteMatrix c) {
  EstimateOutcome out;
  out.correlation = correlate(c);
  out.converged = c.converged;
  out.iterations = c.iterations;
  out.completed = std::move(c);
  return out;
}

}  // namespace

EstimateOutcome run_method(const Dataset& ds, const MethodConfig& method, std::uint64_t seed,
                           const std::filesystem::path& external_file) {
  switch (method.kind) {
    case MethodKind::Mean: return from_completed(impute_mean(ds));
    case MethodKind::Knn: return from_completed(impute_knn(ds, params_or_default<KnnParams>(method)));
    case MethodKind::Mice: {
      auto p = params_or_default<MiceParams>(method);
      p.seed = seed;
      return from_completed(impute_mice(ds, p));
    }
    case MethodKind::SoftImpute:
      return from_completed(impute_softimpute(ds, params_or_default<SoftImputeParams>(method)));
    case MethodKind::ImputePca: return from_completed(impute_pca(ds, params_or_default<PcaParams>(method)));
    case MethodKind::Em: {
      auto em = em_estimate(ds, params_or_default<EmParams>(method));
      EstimateOutcome out;
      out.correlation = correlate(em.estimate);
      out.converged = em.completed.converged;
      out.iterations = em.completed.iterations;
      out.completed = std::move(em.completed);
      return out;
    }
    case MethodKind::Dper: {
      EstimateOutcome out;
      out.correlation = correlate(dper_estimate(ds));
      return out;
    }
    case MethodKind::External: {
      if (external_file.empty()) {
        throw ConfigError("external method '" + method.label + "' needs an imputed CSV file");
      }
      return from_completed(
          import_external_imputed(external_file, ds, method.label, method.external_has_header));
    }
  }
  throw ConfigError("unsupported method");
}

}  // namespace corrgap
