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

#include "corrgap/dataset.hpp"
#include "corrgap/error.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace corrgap;
using corrgap::test::kNaN;
using corrgap::test::make;

TEST(Csv, LoadsIrisFixture) {
  const auto ds = corrgap::test::iris();
  EXPECT_EQ(ds.rows(), 150u);
  EXPECT_EQ(ds.cols(), 4u);
  EXPECT_TRUE(ds.fully_observed());
  EXPECT_EQ(ds.feature_names()[0], "sepal_length");
  EXPECT_DOUBLE_EQ(ds.value(0, 0), 5.1);
}

TEST(Csv, EmptyCellIsMissing) {
  const auto ds = parse_csv("1,\n3,4\n", false);
  ASSERT_EQ(ds.rows(), 2u);
  ASSERT_EQ(ds.cols(), 2u);
  EXPECT_TRUE(ds.is_observed(0, 0));
  EXPECT_FALSE(ds.is_observed(0, 1));
  EXPECT_TRUE(ds.is_observed(1, 0));
  EXPECT_TRUE(ds.is_observed(1, 1));
  EXPECT_TRUE(std::isnan(ds.value(0, 1)));
}

TEST(Csv, NanTokensAreMissing) {
  const auto ds = parse_csv("a,b,c\nNaN,nan,1.5\n", true);
  EXPECT_FALSE(ds.is_observed(0, 0));
  EXPECT_FALSE(ds.is_observed(0, 1));
  EXPECT_DOUBLE_EQ(ds.value(0, 2), 1.5);
}

TEST(Csv, BadCellNamesRowAndColumn) {
  try {
    parse_csv("abc\n", false);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 0"), std::string::npos) << msg;
  }
}

TEST(Csv, RejectsRaggedAndEmpty) {
  EXPECT_THROW(parse_csv("1,2\n3\n", false), DataError);
  EXPECT_THROW(parse_csv("", false), DataError);
  EXPECT_THROW(parse_csv("a,b\n", true), DataError);
  EXPECT_THROW(parse_csv("inf,1\n", false), DataError);
}

TEST(Csv, QuotedHeaderAndCrlf) {
  const auto ds = parse_csv("\"x, first\",\"y\"\r\n1,2\r\n3,4\r\n", true);
  EXPECT_EQ(ds.feature_names()[0], "x, first");
  EXPECT_DOUBLE_EQ(ds.value(1, 1), 4.0);
}

TEST(Csv, RoundTripIsExact) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> z(0.0, 1e3);
  Eigen::MatrixXd v(20, 3);
  Mask obs(20, 3);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 3; ++j) {
      v(i, j) = z(gen);
      obs(i, j) = (i + j) % 4 != 0;
    }
  const Dataset ds(v, obs);
  const auto back = parse_csv(format_csv(ds), true);
  ASSERT_EQ(back.rows(), 20u);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(back.is_observed(i, j), ds.is_observed(i, j));
      if (ds.is_observed(i, j)) EXPECT_EQ(back.value(i, j), ds.value(i, j));
    }
}

TEST(DatasetType, ValidatesShapes) {
  EXPECT_THROW(Dataset(Eigen::MatrixXd::Zero(2, 2), Mask::Constant(2, 3, true)), DataError);
  EXPECT_THROW(Dataset(Eigen::MatrixXd::Zero(2, 4), Mask::Constant(2, 4, true), {}, ImageShape{3, 3}), DataError);
  EXPECT_NO_THROW(Dataset(Eigen::MatrixXd::Zero(2, 4), Mask::Constant(2, 4, true), {}, ImageShape{2, 2}));
}

TEST(DatasetType, MissingPayloadIsNaN) {
  Eigen::MatrixXd v(1, 2);
  v << 1.0, 99.0;
  Mask obs(1, 2);
  obs << true, false;
  const Dataset ds(v, obs);
  EXPECT_TRUE(std::isnan(ds.value(0, 1)));
  EXPECT_EQ(ds.feature_names(), (std::vector<std::string>{"f0", "f1"}));
}

TEST(ImageShapeParse, Basic) {
  EXPECT_EQ(parse_image_shape("28x28"), (ImageShape{28, 28}));
  EXPECT_EQ(parse_image_shape("3x5"), (ImageShape{3, 5}));
  EXPECT_THROW(parse_image_shape("28*28"), ConfigError);
  EXPECT_THROW(parse_image_shape("0x4"), ConfigError);
}

TEST(Normalize, MinMaxEndpoints) {
  const auto [out, spec] = normalize(make({{2.0}, {4.0}, {kNaN}}), NormalizationMode::MinMax01);
  EXPECT_DOUBLE_EQ(out.value(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out.value(1, 0), 1.0);
  EXPECT_FALSE(out.is_observed(2, 0));
}

TEST(Normalize, ZScoreMoments) {
  const auto [out, spec] = normalize(make({{1.0}, {2.0}, {3.0}}), NormalizationMode::ZScore);
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < 3; ++i) mean += out.value(i, 0) / 3.0;
  for (int i = 0; i < 3; ++i) var += (out.value(i, 0) - mean) * (out.value(i, 0) - mean) / 3.0;
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(var, 1.0, 1e-12);
}

TEST(Normalize, ConstantFeatureMapsToZero) {
  const auto [out, spec] = normalize(make({{5.0}, {5.0}, {5.0}}), NormalizationMode::MinMax01);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(out.value(i, 0), 0.0);
}

TEST(Normalize, ParseModes) {
  EXPECT_EQ(parse_normalization_mode("minmax"), NormalizationMode::MinMax01);
  EXPECT_EQ(parse_normalization_mode("zscore"), NormalizationMode::ZScore);
  EXPECT_EQ(parse_normalization_mode("none"), NormalizationMode::None);
  EXPECT_THROW(parse_normalization_mode("robust"), ConfigError);
}

// Property: observed cells land in [0,1] (minmax) or have mean 0 / ML
// variance 1 (zscore); inverting recovers the input.
TEST(NormalizeProperty, RandomFeatures) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto ds = corrgap::test::gaussian_mcar(40, 4, 0.3, seed);
    const auto [mm, mm_spec] = normalize(ds, NormalizationMode::MinMax01);
    const auto [zs, zs_spec] = normalize(ds, NormalizationMode::ZScore);
    for (std::size_t j = 0; j < ds.cols(); ++j) {
      double sum = 0.0, sq = 0.0;
      std::size_t m = 0;
      for (std::size_t i = 0; i < ds.rows(); ++i) {
        ASSERT_EQ(mm.is_observed(i, j), ds.is_observed(i, j));
        if (!ds.is_observed(i, j)) continue;
        EXPECT_GE(mm.value(i, j), 0.0);
        EXPECT_LE(mm.value(i, j), 1.0);
        sum += zs.value(i, j);
        ++m;
      }
      const double mean = sum / static_cast<double>(m);
      for (std::size_t i = 0; i < ds.rows(); ++i)
        if (ds.is_observed(i, j)) sq += (zs.value(i, j) - mean) * (zs.value(i, j) - mean);
      EXPECT_NEAR(mean, 0.0, 1e-9);
      EXPECT_NEAR(sq / static_cast<double>(m), 1.0, 1e-9);
    }
    const auto back = invert_normalization(zs, zs_spec);
    for (std::size_t i = 0; i < ds.rows(); ++i)
      for (std::size_t j = 0; j < ds.cols(); ++j)
        if (ds.is_observed(i, j)) EXPECT_NEAR(back.value(i, j), ds.value(i, j), 1e-9);
  }
}

TEST(Moments, TwoPoints) {
  const auto m = complete_moments(make({{0.0, 0.0}, {2.0, 2.0}}));
  EXPECT_DOUBLE_EQ(m.mean(0), 1.0);
  EXPECT_DOUBLE_EQ(m.mean(1), 1.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(m.cov(i, j), 1.0);
}

TEST(Moments, SingleRowIsZero) {
  const auto m = complete_moments(make({{3.0, -1.0}}));
  EXPECT_TRUE(m.cov.isZero(0.0));
}

TEST(Moments, IdentityRows) {
  const auto m = complete_moments(make({{1.0, 0.0}, {0.0, 1.0}}));
  EXPECT_DOUBLE_EQ(m.cov(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(m.cov(1, 1), 0.25);
  EXPECT_DOUBLE_EQ(m.cov(0, 1), -0.25);
  EXPECT_DOUBLE_EQ(m.cov(1, 0), -0.25);
}

TEST(Moments, RejectsMissing) { EXPECT_THROW(complete_moments(make({{1.0, kNaN}})), DataError); }
