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

#include "corrgap/render.hpp"

#include "corrgap/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

namespace corrgap {
namespace {

constexpr int kMargin = 10;
constexpr int kTitleH = 18;
constexpr int kSubH = 18;
constexpr int kGap = 14;
constexpr int kMinPanelW = 140;
constexpr int kFigTitleH = 26;
constexpr const char* kFont = "font-family=\"DejaVu Sans, Arial, sans-serif\"";

std::string num(double v, const char* fmt = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::uint8_t to_byte(double c) {
  const double scaled = std::floor(std::clamp(c, 0.0, 1.0) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

void svg_open(std::string& out, int w, int h) {
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w) + "\" height=\"" + std::to_string(h) +
         "\" fill=\"#ffffff\"/>\n";
}

void text(std::string& out, int x, int y, const std::string& s, int size, const char* anchor = "middle",
          const char* extra = "") {
  out += "<text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" " + kFont + " font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" + xml_escape(s) + "</text>\n";
}

int panel_width(Eigen::Index dim, int cell_px) {
  return std::max(kMinPanelW, static_cast<int>(dim) * cell_px);
}

int panel_height(Eigen::Index dim, int cell_px) { return kTitleH + static_cast<int>(dim) * cell_px + kSubH; }

void draw_panel(std::string& out, const Panel& p, int x0, int y0, int cell_px) {
  const auto dim = p.matrix.rows();
  const int pw = panel_width(dim, cell_px);
  const int grid = static_cast<int>(dim) * cell_px;
  const int gx = x0 + (pw - grid) / 2;
  const int gy = y0 + kTitleH;
  out += "<g>\n";
  text(out, x0 + pw / 2, y0 + kTitleH - 5, p.title, 12);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const auto c = p.matrix.null_mask(i, j) ? map_color(std::nullopt, p.colormap)
                                              : map_color(p.matrix.values(i, j), p.colormap);
      out += "<rect x=\"" + std::to_string(gx + static_cast<int>(j) * cell_px) + "\" y=\"" +
             std::to_string(gy + static_cast<int>(i) * cell_px) + "\" width=\"" + std::to_string(cell_px) +
             "\" height=\"" + std::to_string(cell_px) + "\" fill=\"" + hex_color(c) + "\"/>\n";
    }
  }
  out += "<rect x=\"" + std::to_string(gx) + "\" y=\"" + std::to_string(gy) + "\" width=\"" + std::to_string(grid) +
         "\" height=\"" + std::to_string(grid) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n";
  if (!p.sublabel.empty()) text(out, x0 + pw / 2, gy + grid + kSubH - 4, p.sublabel, 11);
  out += "</g>\n";
}

constexpr int kBarW = 16;
constexpr int kBarBlock = 90;  // horizontal space reserved for a colorbar

void draw_colorbar(std::string& out, const ColorMap& cmap, const std::string& label, int x0, int y0, int h) {
  out += "<defs>\n<linearGradient id=\"colorbar\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
  for (const auto& cp : cmap.control_points) {
    Rgb8 c{to_byte(cp.color.r), to_byte(cp.color.g), to_byte(cp.color.b)};
    out += "<stop offset=\"" + num(cp.position, "%.4f") + "\" stop-color=\"" + hex_color(c) + "\"/>\n";
  }
  out += "</linearGradient>\n</defs>\n";
  out += "<rect x=\"" + std::to_string(x0) + "\" y=\"" + std::to_string(y0) + "\" width=\"" + std::to_string(kBarW) +
         "\" height=\"" + std::to_string(h) +
         "\" fill=\"url(#colorbar)\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n";
  const double mid = 0.5 * (cmap.vmin + cmap.vmax);
  text(out, x0 + kBarW + 4, y0 + 4, num(cmap.vmax, "%.3g"), 10, "start");
  text(out, x0 + kBarW + 4, y0 + h / 2 + 4, num(mid, "%.3g"), 10, "start");
  text(out, x0 + kBarW + 4, y0 + h + 4, num(cmap.vmin, "%.3g"), 10, "start");
  if (!label.empty()) {
    const int lx = x0 + kBarW + 48;
    const int ly = y0 + h / 2;
    text(out, lx, ly, label, 10, "middle",
         (" transform=\"rotate(-90 " + std::to_string(lx) + " " + std::to_string(ly) + ")\"").c_str());
  }
}

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

// Upper axis limit: 1, 2, 2.5 or 5 times a power of ten.
double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * p >= v) return m * p;
  return 10.0 * p;
}

}  // namespace

void ColorMap::validate() const {
  if (control_points.size() < 2) throw ConfigError("colormap needs at least two control points");
  if (control_points.front().position != 0.0 || control_points.back().position != 1.0) {
    throw ConfigError("colormap control points must start at 0 and end at 1");
  }
  for (std::size_t k = 1; k < control_points.size(); ++k)
    if (!(control_points[k].position > control_points[k - 1].position)) {
      throw ConfigError("colormap control point positions must be strictly increasing");
    }
  if (!(vmin < vmax)) throw ConfigError("colormap requires vmin < vmax");
}

ColorMap correlation_colormap(double vmin, double vmax) {
  ColorMap m;
  m.control_points = {{0.0, {0.0, 0.0, 1.0}}, {0.5, {1.0, 1.0, 1.0}}, {1.0, {1.0, 0.0, 0.0}}};
  m.vmin = vmin;
  m.vmax = vmax;
  return m;
}

ColorMap difference_colormap(double vmax) {
  ColorMap m;
  m.control_points = {{0.0, {1.0, 1.0, 1.0}}, {1.0, {0.0, 0.5, 0.0}}};
  m.vmin = 0.0;
  m.vmax = vmax;
  return m;
}

Rgb8 map_color(std::optional<double> v, const ColorMap& cmap) {
  if (!v || std::isnan(*v)) return cmap.null_color;
  const auto& cps = cmap.control_points;
  const double t = std::clamp((*v - cmap.vmin) / (cmap.vmax - cmap.vmin), 0.0, 1.0);
  std::size_t k = 0;
  while (k + 2 < cps.size() && t > cps[k + 1].position) ++k;
  const auto& lo = cps[k];
  const auto& hi = cps[k + 1];
  const double local = std::clamp((t - lo.position) / (hi.position - lo.position), 0.0, 1.0);
  return Rgb8{to_byte(std::lerp(lo.color.r, hi.color.r, local)), to_byte(std::lerp(lo.color.g, hi.color.g, local)),
              to_byte(std::lerp(lo.color.b, hi.color.b, local))};
}

Rgb8 map_color(double v, const ColorMap& cmap) { return map_color(std::optional<double>(v), cmap); }

std::string hex_color(const Rgb8& c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string render_heatmap(const MaskedMatrix& matrix, const ColorMap& cmap, const std::string& title,
                           const std::string& sublabel, int cell_px) {
  FigureSpec spec;
  spec.rows = 1;
  spec.cols = 1;
  spec.cell_px = cell_px;
  spec.panels.push_back(Panel{matrix, cmap, title, sublabel});
  return render_grid(spec);
}

std::string render_grid(const FigureSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw ConfigError("figure grid must have at least one row and column");
  if (spec.panels.size() != static_cast<std::size_t>(spec.rows) * static_cast<std::size_t>(spec.cols)) {
    throw ConfigError("figure has " + std::to_string(spec.panels.size()) + " slots for a " +
                      std::to_string(spec.rows) + "x" + std::to_string(spec.cols) + " grid");
  }
  if (spec.cell_px < 1) throw ConfigError("cell size must be positive");
  Eigen::Index dim = -1;
  for (const auto& p : spec.panels) {
    if (!p) continue;
    if (p->matrix.rows() != p->matrix.cols()) throw DataError("panel '" + p->title + "' is not square");
    if (dim >= 0 && p->matrix.rows() != dim) {
      throw DataError("figure mixes panel dimensions " + std::to_string(dim) + " and " +
                      std::to_string(p->matrix.rows()));
    }
    dim = p->matrix.rows();
    p->colormap.validate();
  }
  if (dim < 0) throw ConfigError("figure has no panels");
  if (spec.colorbar) spec.colorbar->validate();

  const int pw = panel_width(dim, spec.cell_px);
  const int ph = panel_height(dim, spec.cell_px);
  const int top = kMargin + (spec.title.empty() ? 0 : kFigTitleH);
  const int grid_w = spec.cols * pw + (spec.cols - 1) * kGap;
  const int grid_h = spec.rows * ph + (spec.rows - 1) * kGap;
  const int width = 2 * kMargin + grid_w + (spec.colorbar ? kBarBlock : 0);
  const int height = top + grid_h + kMargin;

  std::string out;
  out.reserve(static_cast<std::size_t>(dim * dim) * spec.panels.size() * 80 + 4096);
  svg_open(out, width, height);
  if (!spec.title.empty()) text(out, width / 2, kMargin + 16, spec.title, 15);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const auto& slot = spec.panels[static_cast<std::size_t>(r * spec.cols + c)];
      if (!slot) continue;
      draw_panel(out, *slot, kMargin + c * (pw + kGap), top + r * (ph + kGap), spec.cell_px);
    }
  }
  if (spec.colorbar) {
    const int bar_h = std::max(60, std::min(grid_h - 2 * kTitleH, 240));
    draw_colorbar(out, *spec.colorbar, spec.colorbar_label, kMargin + grid_w + 16, top + kTitleH, bar_h);
  }
  out += "</svg>\n";
  return out;
}

std::string render_rmse_lines(const std::vector<MethodResult>& results, const std::vector<double>& rates,
                              const std::string& title, const std::string& x_label) {
  if (rates.empty()) throw ConfigError("line chart needs at least one rate");
  double ymax = 0.0;
  for (const auto& m : results) {
    for (double r : rates) {
      if (!m.ok_at(r)) {
        throw DataError("line chart: method '" + m.method + "' has no RMSE at rate " + num(r, "%g"));
      }
      ymax = std::max(ymax, m.per_rate.at(r).rmse);
    }
  }
  ymax = nice_ceiling(ymax);

  constexpr int W = 680, H = 420, L = 70, R = 170, T = 44, B = 56;
  const int pw = W - L - R;
  const int ph = H - T - B;
  const double xmin = *std::min_element(rates.begin(), rates.end());
  const double xmax = *std::max_element(rates.begin(), rates.end());
  auto xpos = [&](double x) {
    if (xmax == xmin) return L + pw / 2.0;
    return L + (x - xmin) / (xmax - xmin) * pw * 0.9 + pw * 0.05;
  };
  auto ypos = [&](double y) { return T + ph - y / ymax * ph; };

  std::string out;
  svg_open(out, W, H);
  text(out, W / 2, 26, title, 15);
  out += "<rect x=\"" + std::to_string(L) + "\" y=\"" + std::to_string(T) + "\" width=\"" + std::to_string(pw) +
         "\" height=\"" + std::to_string(ph) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double yv = ymax * k / 5.0;
    const std::string y = num(ypos(yv));
    out += "<line x1=\"" + std::to_string(L) + "\" y1=\"" + y + "\" x2=\"" + std::to_string(L + pw) + "\" y2=\"" + y +
           "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    text(out, L - 6, static_cast<int>(std::lround(ypos(yv))) + 4, num(yv, "%.4g"), 11, "end");
  }
  for (double r : rates) {
    const std::string x = num(xpos(r));
    out += "<line x1=\"" + x + "\" y1=\"" + std::to_string(T + ph) + "\" x2=\"" + x + "\" y2=\"" +
           std::to_string(T + ph + 5) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    text(out, static_cast<int>(std::lround(xpos(r))), T + ph + 18, num(r * 100.0, "%.4g") + "%", 11);
  }
  text(out, L + pw / 2, H - 14, x_label, 12);
  {
    const int lx = 18;
    const int ly = T + ph / 2;
    text(out, lx, ly, "RMSE", 12, "middle",
         (" transform=\"rotate(-90 " + std::to_string(lx) + " " + std::to_string(ly) + ")\"").c_str());
  }

  for (std::size_t m = 0; m < results.size(); ++m) {
    const char* color = kPalette[m % kPalette.size()];
    std::string pts;
    for (double r : rates) {
      if (!pts.empty()) pts.push_back(' ');
      pts += num(xpos(r)) + "," + num(ypos(results[m].per_rate.at(r).rmse));
    }
    if (rates.size() > 1) {
      out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    }
    for (double r : rates) {
      out += "<circle cx=\"" + num(xpos(r)) + "\" cy=\"" + num(ypos(results[m].per_rate.at(r).rmse)) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    const int ly = T + 10 + static_cast<int>(m) * 18;
    out += "<line x1=\"" + std::to_string(L + pw + 14) + "\" y1=\"" + std::to_string(ly) + "\" x2=\"" +
           std::to_string(L + pw + 38) + "\" y2=\"" + std::to_string(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    text(out, L + pw + 44, ly + 4, results[m].method, 11, "start");
  }
  out += "</svg>\n";
  return out;
}

}  // namespace corrgap
