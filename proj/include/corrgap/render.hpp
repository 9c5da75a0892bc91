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

#include "corrgap/matrix_types.hpp"
#include "corrgap/metrics.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace corrgap {

struct Rgb {
  double r = 0.0, g = 0.0, b = 0.0;  ///< each in [0, 1]
};

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

struct ControlPoint {
  double position = 0.0;
  Rgb color;
};

/// Piecewise-linear colormap over [vmin, vmax].
struct ColorMap {
  std::vector<ControlPoint> control_points;
  double vmin = 0.0;
  double vmax = 1.0;
  Rgb8 null_color{128, 128, 128};

  /// Throws ConfigError unless positions run strictly upward from 0 to 1 and
  /// vmin < vmax.
  void validate() const;
};

/// Blue-white-red over [vmin, vmax] (default [-1, 1]).
ColorMap correlation_colormap(double vmin = -1.0, double vmax = 1.0);
/// White to dark green over [0, vmax].
ColorMap difference_colormap(double vmax);

/// Rounds half-up to 8 bits per channel; std::nullopt is the null sentinel.
Rgb8 map_color(std::optional<double> v, const ColorMap& cmap);
Rgb8 map_color(double v, const ColorMap& cmap);

std::string hex_color(const Rgb8& c);

struct Panel {
  MaskedMatrix matrix;
  ColorMap colormap;
  std::string title;
  std::string sublabel;
};

/// Grid of heatmap panels, row-major. Empty slots leave a blank cell.
struct FigureSpec {
  std::string title;
  int rows = 1;
  int cols = 1;
  std::vector<std::optional<Panel>> panels;
  int cell_px = 12;
  /// Shared colorbar drawn to the right of the grid when set.
  std::optional<ColorMap> colorbar;
  std::string colorbar_label;
};

/// One filled rectangle per cell, row 0 at the top, title above and
/// sublabel below.
std::string render_heatmap(const MaskedMatrix& matrix, const ColorMap& cmap, const std::string& title,
                           const std::string& sublabel, int cell_px = 12);

/// Throws ConfigError for an empty spec or a slot count mismatch, DataError
/// for non-square or mixed-dimension panels.
std::string render_grid(const FigureSpec& spec);

/// One polyline per method over (rate, RMSE). Throws DataError naming the
/// method and rate of any missing point.
std::string render_rmse_lines(const std::vector<MethodResult>& results, const std::vector<double>& rates,
                              const std::string& title = "RMSE vs missing rate",
                              const std::string& x_label = "missing rate");

/// XML-escapes text content and attribute values.
std::string xml_escape(const std::string& text);

}  // namespace corrgap
