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
#include "corrgap/render.hpp"

#include <gtest/gtest.h>

#include <regex>

using namespace corrgap;

namespace {

// Fill colors of the heatmap cells (rects of exactly cell_px x cell_px).
std::vector<std::string> cell_fills(const std::string& svg, int cell_px = 12) {
  const std::regex re("<rect x=\"\\d+\" y=\"\\d+\" width=\"" + std::to_string(cell_px) + "\" height=\"" +
                      std::to_string(cell_px) + "\" fill=\"(#[0-9a-f]{6})\"/>");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.push_back((*it)[1]);
  return out;
}

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

Rgb8 rgb(int r, int g, int b) {
  return Rgb8{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

void expect_color(const Rgb8& got, const Rgb8& want) {
  EXPECT_EQ(got.r, want.r);
  EXPECT_EQ(got.g, want.g);
  EXPECT_EQ(got.b, want.b);
}

MaskedMatrix identity(int d) { return MaskedMatrix(Eigen::MatrixXd::Identity(d, d), Mask::Constant(d, d, false)); }

MethodResult series(const std::string& name, const std::vector<double>& rates, const std::vector<double>& rmse) {
  MethodResult m;
  m.method = name;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    RateResult r;
    r.rmse = rmse[k];
    m.per_rate[rates[k]] = r;
  }
  return m;
}

}  // namespace

TEST(ColorMapTest, CorrelationAnchors) {
  const auto cm = correlation_colormap();
  expect_color(map_color(-1.0, cm), rgb(0, 0, 255));
  expect_color(map_color(0.0, cm), rgb(255, 255, 255));
  expect_color(map_color(1.0, cm), rgb(255, 0, 0));
  expect_color(map_color(0.5, cm), rgb(255, 128, 128));
  expect_color(map_color(-0.5, cm), rgb(128, 128, 255));
  expect_color(map_color(std::nullopt, cm), rgb(128, 128, 128));
}

TEST(ColorMapTest, ClampsOutOfRange) {
  const auto cm = correlation_colormap();
  expect_color(map_color(-3.0, cm), rgb(0, 0, 255));
  expect_color(map_color(7.0, cm), rgb(255, 0, 0));
}

TEST(ColorMapTest, DifferenceMap) {
  const auto cm = difference_colormap(0.5);
  expect_color(map_color(0.0, cm), rgb(255, 255, 255));
  expect_color(map_color(0.5, cm), rgb(0, 128, 0));
  EXPECT_EQ(hex_color(map_color(0.0, cm)), "#ffffff");
}

TEST(ColorMapTest, Validation) {
  EXPECT_THROW(difference_colormap(0.0).validate(), ConfigError);
  ColorMap bad = correlation_colormap();
  bad.control_points[1].position = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = correlation_colormap();
  bad.control_points.back().position = 0.9;
  EXPECT_THROW(bad.validate(), ConfigError);
}

// Property: each channel moves monotonically between two control points.
TEST(ColorMapProperty, MonotoneChannels) {
  const auto cm = correlation_colormap();
  Rgb8 prev = map_color(-1.0, cm);
  for (int k = 1; k <= 1000; ++k) {
    const double v = -1.0 + 2.0 * k / 1000.0;
    const auto c = map_color(v, cm);
    if (v <= 0.0) {
      EXPECT_GE(c.r, prev.r);
      EXPECT_GE(c.g, prev.g);
      EXPECT_EQ(c.b, 255);
    } else {
      EXPECT_EQ(c.r, 255);
      EXPECT_LE(c.g, prev.g);
      EXPECT_LE(c.b, prev.b);
    }
    prev = c;
  }
}

TEST(Heatmap, IdentityColors) {
  const auto svg = render_heatmap(identity(2), correlation_colormap(), "I", "");
  const auto fills = cell_fills(svg);
  ASSERT_EQ(fills.size(), 4u);
  EXPECT_EQ(fills[0], "#ff0000");
  EXPECT_EQ(fills[1], "#ffffff");
  EXPECT_EQ(fills[2], "#ffffff");
  EXPECT_EQ(fills[3], "#ff0000");
}

TEST(Heatmap, AllNullIsGray) {
  const MaskedMatrix m(Eigen::MatrixXd::Zero(3, 3), Mask::Constant(3, 3, true));
  const auto fills = cell_fills(render_heatmap(m, correlation_colormap(), "null", ""));
  ASSERT_EQ(fills.size(), 9u);
  for (const auto& f : fills) EXPECT_EQ(f, "#808080");
}

TEST(Heatmap, DeterministicAndEscaped) {
  const auto a = render_heatmap(identity(3), correlation_colormap(), "A & <B>", "(1) RMSE: 0.1000");
  const auto b = render_heatmap(identity(3), correlation_colormap(), "A & <B>", "(1) RMSE: 0.1000");
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("A &amp; &lt;B&gt;"), std::string::npos);
  EXPECT_NE(a.find("(1) RMSE: 0.1000"), std::string::npos);
  EXPECT_NE(a.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
}

TEST(Grid, LayoutCount) {
  FigureSpec spec;
  spec.rows = 2;
  spec.cols = 4;
  for (int k = 0; k < 8; ++k) spec.panels.push_back(Panel{identity(3), correlation_colormap(), "p", ""});
  const auto svg = render_grid(spec);
  EXPECT_EQ(count(svg, "<g>"), 8u);
  EXPECT_EQ(cell_fills(svg).size(), 72u);
}

TEST(Grid, BlankSlotsAndSingleton) {
  FigureSpec spec;
  spec.rows = 1;
  spec.cols = 2;
  spec.panels = {Panel{identity(2), correlation_colormap(), "p", ""}, std::nullopt};
  EXPECT_EQ(count(render_grid(spec), "<g>"), 1u);
  spec.cols = 1;
  spec.panels.pop_back();
  EXPECT_NO_THROW(render_grid(spec));
}

TEST(Grid, WhiteGroundTruthDifference) {
  FigureSpec spec;
  spec.rows = 1;
  spec.cols = 1;
  spec.panels.push_back(
      Panel{MaskedMatrix(Eigen::MatrixXd::Zero(4, 4), Mask::Constant(4, 4, false)), difference_colormap(0.3), "GT", ""});
  for (const auto& f : cell_fills(render_grid(spec))) EXPECT_EQ(f, "#ffffff");
}

TEST(Grid, Errors) {
  FigureSpec spec;
  spec.rows = 1;
  spec.cols = 2;
  spec.panels = {Panel{identity(2), correlation_colormap(), "a", ""}};
  EXPECT_THROW(render_grid(spec), ConfigError);
  spec.panels.push_back(Panel{identity(3), correlation_colormap(), "b", ""});
  EXPECT_THROW(render_grid(spec), DataError);
  spec.panels = {std::nullopt, std::nullopt};
  EXPECT_THROW(render_grid(spec), ConfigError);
}

TEST(Lines, IncreasingSeriesGoesUp) {
  const std::vector<double> rates{0.1, 0.2, 0.3};
  const auto svg = render_rmse_lines({series("Mean", rates, {0.1, 0.2, 0.3})}, rates);
  const std::regex re("<polyline points=\"([^\"]*)\"");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, re));
  std::vector<double> ys;
  const std::string pts = m[1];
  const std::regex pt("[-0-9.]+,([-0-9.]+)");
  for (auto it = std::sregex_iterator(pts.begin(), pts.end(), pt); it != std::sregex_iterator(); ++it)
    ys.push_back(std::stod((*it)[1]));
  ASSERT_EQ(ys.size(), 3u);
  // SVG y grows downward.
  EXPECT_GT(ys[0], ys[1]);
  EXPECT_GT(ys[1], ys[2]);
}

TEST(Lines, SinglePointAndOverlap) {
  const auto one = render_rmse_lines({series("Only", {0.5}, {0.2})}, {0.5});
  EXPECT_EQ(count(one, "<circle"), 1u);
  EXPECT_EQ(count(one, "<polyline"), 0u);
  const std::vector<double> rates{0.1, 0.2};
  const auto two = render_rmse_lines({series("A", rates, {0.1, 0.2}), series("B", rates, {0.1, 0.2})}, rates);
  EXPECT_EQ(count(two, "<polyline"), 2u);
  EXPECT_NE(two.find(">A<"), std::string::npos);
  EXPECT_NE(two.find(">B<"), std::string::npos);
}
