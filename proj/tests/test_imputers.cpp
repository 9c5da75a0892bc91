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

#include "corrgap/error.hpp"
#include "corrgap/estimators.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace corrgap;
using corrgap::test::kNaN;
using corrgap::test::make;

namespace {

void expect_observed_unchanged(const Dataset& ds, const Eigen::MatrixXd& out) {
  ASSERT_EQ(static_cast<std::size_t>(out.rows()), ds.rows());
  ASSERT_EQ(static_cast<std::size_t>(out.cols()), ds.cols());
  for (std::size_t i = 0; i < ds.rows(); ++i)
    for (std::size_t j = 0; j < ds.cols(); ++j)
      if (ds.is_observed(i, j)) {
        EXPECT_EQ(out(i, j), ds.value(i, j));
      } else {
        EXPECT_TRUE(std::isfinite(out(i, j)));
      }
}

// Simple least squares y ~ a + b x.
std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k] / x.size();
    my += y[k] / y.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

}  // namespace

TEST(MeanImpute, FillsFeatureMean) {
  const auto out = impute_mean(make({{1.0}, {3.0}, {kNaN}}));
  EXPECT_DOUBLE_EQ(out.values(2, 0), 2.0);
}

TEST(MeanImpute, IndependentColumns) {
  const auto ds = make({{1.0, kNaN}, {kNaN, 10.0}, {4.0, 4.0}});
  const auto out = impute_mean(ds);
  EXPECT_DOUBLE_EQ(out.values(1, 0), 2.5);
  EXPECT_DOUBLE_EQ(out.values(0, 1), 7.0);
  expect_observed_unchanged(ds, out.values);
}

TEST(MeanImpute, RejectsEmptyFeature) { EXPECT_THROW(impute_mean(make({{1.0, kNaN}, {2.0, kNaN}})), DataError); }

TEST(KnnImpute, TwoNearestByScaledDistance) {
  const auto ds = make({{1.0, kNaN}, {1.0, 5.0}, {1.0, 7.0}, {9.0, 9.0}});
  const auto out = impute_knn(ds, KnnParams{2});
  EXPECT_DOUBLE_EQ(out.values(0, 1), 6.0);
}

TEST(KnnImpute, KTruncatedToAvailableNeighbours) {
  const auto ds = make({{1.0, kNaN, 5.0}, {2.0, 4.0, kNaN}, {3.0, kNaN, 6.0}});
  const auto out = impute_knn(ds, KnnParams{5});
  EXPECT_DOUBLE_EQ(out.values(0, 1), 4.0);
  EXPECT_DOUBLE_EQ(out.values(2, 1), 4.0);
}

TEST(KnnImpute, RejectsBadK) { EXPECT_THROW(impute_knn(make({{1.0}, {kNaN}}), KnnParams{0}), ConfigError); }

// Brute-force oracle with the nan-euclidean distance, ties broken by row
// index and falling back to the feature mean.
TEST(KnnProperty, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ds = corrgap::test::gaussian_mcar(30, 4, 0.3, seed);
    const int k = 3;
    const auto out = impute_knn(ds, KnnParams{k});
    expect_observed_unchanged(ds, out.values);
    const std::size_t n = ds.rows(), d = ds.cols();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (ds.is_observed(i, j)) continue;
        std::vector<std::pair<double, std::size_t>> cand;
        for (std::size_t s = 0; s < n; ++s) {
          if (s == i || !ds.is_observed(s, j)) continue;
          double sum = 0;
          int shared = 0;
          for (std::size_t c = 0; c < d; ++c)
            if (ds.is_observed(i, c) && ds.is_observed(s, c)) {
              sum += std::pow(ds.value(i, c) - ds.value(s, c), 2);
              ++shared;
            }
          if (shared > 0) cand.emplace_back(std::sqrt(double(d) / shared * sum), s);
        }
        std::sort(cand.begin(), cand.end());
        double expected = 0;
        const std::size_t used = std::min<std::size_t>(k, cand.size());
        for (std::size_t q = 0; q < used; ++q) expected += ds.value(cand[q].second, j) / used;
        if (used == 0) {
          std::size_t c = 0;
          for (std::size_t s = 0; s < n; ++s)
            if (ds.is_observed(s, j)) expected += ds.value(s, j), ++c;
          expected /= c;
        }
        EXPECT_NEAR(out.values(i, j), expected, 1e-12);
      }
    }
  }
}

TEST(MiceImpute, RecoversExactLine) {
  const auto ds = make({{1, 2}, {2, 4}, {3, kNaN}, {4, 8}, {5, 10}, {6, 12}});
  const auto out = impute_mice(ds);
  EXPECT_NEAR(out.values(2, 1), 6.0, 1e-6);
}

TEST(MiceImpute, FullyObservedUnchanged) {
  const auto ds = make({{1, 2}, {2, 1}, {3, 5}});
  EXPECT_EQ(impute_mice(ds).values, ds.values());
}

// tol = infinity stops after one sweep: mean fill, then each incomplete
// feature (fewest missing first, ties by index) is regressed on the others.
TEST(MiceImpute, SingleSweepTrace) {
  const auto ds = make({{1, 2}, {2, kNaN}, {kNaN, 5}, {4, 9}});
  MiceParams p;
  p.tol = std::numeric_limits<double>::infinity();
  p.ridge = 0.0;
  const auto out = impute_mice(ds, p);
  EXPECT_EQ(out.iterations, 1);

  const double y_mean = (2.0 + 5.0 + 9.0) / 3.0;
  // Feature 0 on feature 1 using rows 0, 1, 3 (row 1 carries the mean fill).
  const auto [a0, b0] = ols({2.0, y_mean, 9.0}, {1.0, 2.0, 4.0});
  const double x2 = a0 + b0 * 5.0;
  // Feature 1 on feature 0 using rows 0, 2, 3 (row 2 carries the new fill).
  const auto [a1, b1] = ols({1.0, x2, 4.0}, {2.0, 5.0, 9.0});
  EXPECT_NEAR(out.values(2, 0), x2, 1e-12);
  EXPECT_NEAR(out.values(1, 1), a1 + b1 * 2.0, 1e-12);
}

TEST(MiceProperty, PassesObservedThrough) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = corrgap::test::gaussian_mcar(50, 5, 0.3, seed);
    expect_observed_unchanged(ds, impute_mice(ds).values);
  }
}

TEST(SoftImpute, RankOneCompletion) {
  const auto ds = make({{1, 2}, {2, kNaN}});
  SoftImputeParams p;
  p.lambda_frac = 0.0;
  p.max_rank = 1;
  p.max_iter = 10000;
  p.tol = 1e-14;
  const auto out = impute_softimpute(ds, p);
  EXPECT_NEAR(out.values(1, 1), 4.0, 1e-6);
}

TEST(SoftImpute, FullyObservedUnchanged) {
  const auto ds = make({{1, 2}, {3, 5}, {0, 1}});
  EXPECT_EQ(impute_softimpute(ds).values, ds.values());
}

TEST(SoftImpute, RejectsBadLambda) {
  SoftImputeParams p;
  p.lambda_frac = 1.0;
  EXPECT_THROW(impute_softimpute(make({{1.0}, {kNaN}, {2.0}}), p), ConfigError);
}

TEST(SoftImputeProperty, ObjectiveNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto ds = corrgap::test::gaussian_mcar(100, 5, 0.3, seed);
    const auto r = impute_softimpute_traced(ds);
    ASSERT_GE(r.objective_trace.size(), 2u);
    for (std::size_t t = 1; t < r.objective_trace.size(); ++t)
      EXPECT_LE(r.objective_trace[t], r.objective_trace[t - 1] * (1 + 1e-12) + 1e-12) << "seed " << seed;
    expect_observed_unchanged(ds, r.completed.values);
  }
}

TEST(ImputePca, RankOneAffineRecovery) {
  // Rows mu + t * v with mu = (1, -2, 3), v = (2, 1, -1).
  const std::vector<double> t{-2.0, -0.5, 0.0, 1.0, 3.0};
  std::vector<std::vector<double>> rows;
  for (double s : t) rows.push_back({1 + 2 * s, -2 + s, 3 - s});
  const double truth = rows[3][2];
  rows[3][2] = kNaN;
  PcaParams p;
  p.n_components = 1;
  p.max_iter = 10000;
  p.tol = 1e-14;
  const auto out = impute_pca(make(rows), p);
  EXPECT_NEAR(out.values(3, 2), truth, 1e-6);
}

TEST(ImputePca, FullRankIsStationary) {
  const auto ds = make({{1, 2, 0.5}, {2, kNaN, 1}, {0, 1, kNaN}, {3, 3, 2}, {1, 0, 1}, {2, 2, 2}});
  PcaParams p;
  p.n_components = 3;
  p.tol = 1e-10;
  const auto out = impute_pca(ds, p);
  // A full-rank reconstruction reproduces its input, so the mean fill is
  // already a fixed point of refilling.
  const auto mean = impute_mean(ds);
  EXPECT_LT((out.values - mean.values).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ImputePca, FullyObservedUnchanged) {
  const auto ds = make({{1, 2, 3}, {3, 5, 1}, {0, 1, 1}});
  EXPECT_EQ(impute_pca(ds).values, ds.values());
}

TEST(ImputePca, RejectsTooManyComponents) {
  PcaParams p;
  p.n_components = 4;
  EXPECT_THROW(impute_pca(make({{1, 2, 3}, {3, kNaN, 1}, {0, 1, 1}, {1, 1, 1}}), p), ConfigError);
}

TEST(External, IdenticalFileMatchesTruth) {
  corrgap::test::TempDir dir("external");
  const auto truth = make({{1, 2}, {3, 4}, {5, 7}});
  const auto masked = make({{1, kNaN}, {3, 4}, {kNaN, 7}});
  write_csv(dir / "imputed.csv", truth);
  const auto out = import_external_imputed(dir / "imputed.csv", masked, "GAIN");
  EXPECT_EQ(out.values, truth.values());
  EXPECT_EQ(out.source_method, "GAIN");
}

TEST(External, ObservedCellsRestored) {
  corrgap::test::TempDir dir("external");
  const auto masked = make({{1, kNaN}, {3, 4}});
  corrgap::test::spit(dir / "imputed.csv", "a,b\n100,9\n300,400\n");
  const auto out = import_external_imputed(dir / "imputed.csv", masked, "X");
  EXPECT_DOUBLE_EQ(out.values(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(out.values(0, 1), 9.0);
  EXPECT_DOUBLE_EQ(out.values(1, 1), 4.0);
}

TEST(External, WrongShapeNamesDimensions) {
  corrgap::test::TempDir dir("external");
  corrgap::test::spit(dir / "imputed.csv", "a,b,c\n1,2,3\n");
  try {
    import_external_imputed(dir / "imputed.csv", make({{1, kNaN}, {3, 4}}), "X");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("1x3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2x2"), std::string::npos) << msg;
  }
}

TEST(External, StillMissingIsAnError) {
  corrgap::test::TempDir dir("external");
  corrgap::test::spit(dir / "imputed.csv", "a,b\n1,\n3,4\n");
  EXPECT_THROW(import_external_imputed(dir / "imputed.csv", make({{1, kNaN}, {3, 4}}), "X"), DataError);
}

TEST(Imputers, FullyObservedAreNoOps) {
  const auto ds = corrgap::test::iris();
  EXPECT_EQ(impute_mean(ds).values, ds.values());
  EXPECT_EQ(impute_knn(ds).values, ds.values());
}
