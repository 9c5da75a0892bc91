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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

namespace corrgap {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

// RFC-4180 field splitting for a single record. Quoted fields may contain
// commas and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"' && trim(cur).empty()) {
      quoted = true;
      was_quoted = true;
      cur.clear();
    } else if (ch == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw DataError("unterminated quoted field on line " + std::to_string(line_no + 1));
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

bool is_missing_token(const std::string& cell) { return cell.empty() || iequals(cell, "nan"); }

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace

ImageShape parse_image_shape(const std::string& text) {
  auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw ConfigError("image shape must look like HxW, got '" + text + "'");
  ImageShape s;
  auto h = text.substr(0, x);
  auto w = text.substr(x + 1);
  auto rh = std::from_chars(h.data(), h.data() + h.size(), s.height);
  auto rw = std::from_chars(w.data(), w.data() + w.size(), s.width);
  if (rh.ec != std::errc{} || rh.ptr != h.data() + h.size() || rw.ec != std::errc{} ||
      rw.ptr != w.data() + w.size() || s.height == 0 || s.width == 0) {
    throw ConfigError("image shape must look like HxW, got '" + text + "'");
  }
  return s;
}

Dataset::Dataset(Eigen::MatrixXd values, Mask observed, std::vector<std::string> feature_names,
                 std::optional<ImageShape> image_shape)
    : values_(std::move(values)),
      observed_(std::move(observed)),
      feature_names_(std::move(feature_names)),
      image_shape_(image_shape) {
  if (values_.rows() != observed_.rows() || values_.cols() != observed_.cols()) {
    throw DataError("dataset: values are " + std::to_string(values_.rows()) + "x" +
                    std::to_string(values_.cols()) + " but mask is " + std::to_string(observed_.rows()) + "x" +
                    std::to_string(observed_.cols()));
  }
  if (feature_names_.empty()) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) feature_names_.push_back("f" + std::to_string(j));
  }
  if (feature_names_.size() != cols()) {
    throw DataError("dataset: " + std::to_string(feature_names_.size()) + " feature names for " +
                    std::to_string(cols()) + " columns");
  }
  if (image_shape_ && image_shape_->height * image_shape_->width != cols()) {
    throw DataError("image shape " + std::to_string(image_shape_->height) + "x" +
                    std::to_string(image_shape_->width) + " does not match " + std::to_string(cols()) +
                    " features");
  }
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      if (!observed_(i, j)) values_(i, j) = kNaN;
    }
  }
}

Dataset Dataset::complete(Eigen::MatrixXd values, std::vector<std::string> feature_names) {
  Mask m = Mask::Constant(values.rows(), values.cols(), true);
  return Dataset(std::move(values), std::move(m), std::move(feature_names));
}

std::size_t Dataset::observed_count(std::size_t feature) const {
  return static_cast<std::size_t>(observed_.col(static_cast<Eigen::Index>(feature)).count());
}

Dataset Dataset::with_image_shape(std::optional<ImageShape> shape) const {
  return Dataset(values_, observed_, feature_names_, shape);
}

Dataset Dataset::with_cells(Eigen::MatrixXd values, Mask observed) const {
  return Dataset(std::move(values), std::move(observed), feature_names_, image_shape_);
}

Dataset parse_csv(const std::string& text, bool has_header) {
  auto lines = split_lines(text);
  std::size_t first = 0;
  std::vector<std::string> names;
  if (has_header) {
    if (lines.empty()) throw DataError("CSV is empty (no header)");
    names = split_record(lines[0], 0);
    first = 1;
  }
  if (lines.size() <= first) throw DataError("CSV has zero data rows");
  std::vector<std::vector<std::string>> records;
  records.reserve(lines.size() - first);
  for (std::size_t l = first; l < lines.size(); ++l) records.push_back(split_record(lines[l], l));

  const std::size_t d = has_header ? names.size() : records.front().size();
  if (d == 0) throw DataError("CSV has zero columns");
  const std::size_t n = records.size();

  Eigen::MatrixXd values(n, d);
  Mask observed(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = records[i];
    if (rec.size() != d) {
      throw DataError("ragged CSV: row " + std::to_string(i) + " has " + std::to_string(rec.size()) +
                      " fields, expected " + std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      const auto& cell = rec[j];
      auto ii = static_cast<Eigen::Index>(i);
      auto jj = static_cast<Eigen::Index>(j);
      if (is_missing_token(cell)) {
        observed(ii, jj) = false;
        values(ii, jj) = kNaN;
        continue;
      }
      const char* b = cell.data();
      const char* e = b + cell.size();
      if (b != e && *b == '+') ++b;
      double v = 0.0;
      auto res = std::from_chars(b, e, v);
      if (res.ec != std::errc{} || res.ptr != e || !std::isfinite(v)) {
        throw DataError("cannot parse '" + cell + "' as a finite number at row " + std::to_string(i) +
                        ", column " + std::to_string(j));
      }
      observed(ii, jj) = true;
      values(ii, jj) = v;
    }
  }
  return Dataset(std::move(values), std::move(observed), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), has_header);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_csv(const Dataset& ds) {
  std::string out;
  const auto& names = ds.feature_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out.push_back(',');
    out += quote_if_needed(names[j]);
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < ds.cols(); ++j) {
      if (j) out.push_back(',');
      if (ds.is_observed(i, j)) append_double(out, ds.value(i, j));
      else out += "NaN";
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& ds) { write_text(path, format_csv(ds)); }

void write_mask_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::string out;
  const auto& names = ds.feature_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out.push_back(',');
    out += quote_if_needed(names[j]);
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < ds.cols(); ++j) {
      if (j) out.push_back(',');
      out.push_back(ds.is_observed(i, j) ? '0' : '1');
    }
    out.push_back('\n');
  }
  write_text(path, out);
}

NormalizationMode parse_normalization_mode(const std::string& text) {
  if (iequals(text, "minmax") || iequals(text, "minmax01")) return NormalizationMode::MinMax01;
  if (iequals(text, "zscore")) return NormalizationMode::ZScore;
  if (iequals(text, "none")) return NormalizationMode::None;
  throw ConfigError("unknown normalization mode '" + text + "' (expected minmax, zscore or none)");
}

const char* to_string(NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::MinMax01: return "minmax";
    case NormalizationMode::ZScore: return "zscore";
    case NormalizationMode::None: return "none";
  }
  return "none";
}

namespace {

double scale_of(NormalizationMode mode, const std::pair<double, double>& p) {
  switch (mode) {
    case NormalizationMode::MinMax01: {
      double range = p.second - p.first;
      return range > 0.0 ? range : 1.0;
    }
    case NormalizationMode::ZScore: return p.second > 0.0 ? p.second : 1.0;
    case NormalizationMode::None: return 1.0;
  }
  return 1.0;
}

}  // namespace

std::pair<Dataset, NormalizationSpec> normalize(const Dataset& ds, NormalizationMode mode) {
  NormalizationSpec spec;
  spec.mode = mode;
  spec.per_feature_params.reserve(ds.cols());
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    const auto cnt = ds.observed_count(j);
    if (cnt == 0) {
      throw DataError("cannot normalize feature '" + ds.feature_names()[j] + "' (column " + std::to_string(j) +
                      "): no observed cells");
    }
    const auto col = ds.values().col(static_cast<Eigen::Index>(j));
    const auto obs = ds.observed().col(static_cast<Eigen::Index>(j));
    switch (mode) {
      case NormalizationMode::MinMax01: {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
          if (!obs(i)) continue;
          lo = std::min(lo, col(i));
          hi = std::max(hi, col(i));
        }
        spec.per_feature_params.emplace_back(lo, hi);
        break;
      }
      case NormalizationMode::ZScore: {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < col.size(); ++i)
          if (obs(i)) sum += col(i);
        const double mean = sum / static_cast<double>(cnt);
        double ss = 0.0;
        for (Eigen::Index i = 0; i < col.size(); ++i)
          if (obs(i)) ss += (col(i) - mean) * (col(i) - mean);
        spec.per_feature_params.emplace_back(mean, std::sqrt(ss / static_cast<double>(cnt)));
        break;
      }
      case NormalizationMode::None: spec.per_feature_params.emplace_back(0.0, 1.0); break;
    }
  }
  return {apply_normalization(ds, spec), spec};
}

Dataset apply_normalization(const Dataset& ds, const NormalizationSpec& spec) {
  if (spec.per_feature_params.size() != ds.cols()) {
    throw DataError("normalization spec has " + std::to_string(spec.per_feature_params.size()) +
                    " features, dataset has " + std::to_string(ds.cols()));
  }
  Eigen::MatrixXd v = ds.values();
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    const auto& p = spec.per_feature_params[j];
    const double offset = spec.mode == NormalizationMode::None ? 0.0 : p.first;
    const double scale = scale_of(spec.mode, p);
    auto jj = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (ds.observed()(i, jj)) v(i, jj) = (v(i, jj) - offset) / scale;
    }
  }
  return ds.with_cells(std::move(v), ds.observed());
}

Dataset invert_normalization(const Dataset& ds, const NormalizationSpec& spec) {
  if (spec.per_feature_params.size() != ds.cols()) {
    throw DataError("normalization spec does not match dataset width");
  }
  Eigen::MatrixXd v = ds.values();
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    const auto& p = spec.per_feature_params[j];
    const double offset = spec.mode == NormalizationMode::None ? 0.0 : p.first;
    const double scale = scale_of(spec.mode, p);
    auto jj = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (ds.observed()(i, jj)) v(i, jj) = v(i, jj) * scale + offset;
    }
  }
  return ds.with_cells(std::move(v), ds.observed());
}

Moments matrix_moments(const Eigen::MatrixXd& x) {
  const auto n = static_cast<double>(x.rows());
  Moments m;
  m.mean = x.colwise().mean().transpose();
  Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
  m.cov = (centered.transpose() * centered) / n;
  for (Eigen::Index j = 0; j < m.cov.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m.cov.rows(); ++i) m.cov(i, j) = m.cov(j, i);
  return m;
}

Moments complete_moments(const Dataset& ds) {
  if (!ds.fully_observed()) throw DataError("complete_moments requires a fully observed dataset");
  if (ds.rows() == 0) throw DataError("complete_moments requires at least one row");
  return matrix_moments(ds.values());
}

}  // namespace corrgap
