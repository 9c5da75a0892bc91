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
#include "corrgap/missingness.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace corrgap::test {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Rows of values; NaN marks a missing cell.
inline Dataset make(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size());
  Eigen::MatrixXd v(n, d);
  Mask obs(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      v(i, j) = rows[i][j];
      obs(i, j) = !std::isnan(rows[i][j]);
    }
  }
  return Dataset(v, obs);
}

inline Dataset iris() { return load_csv(CORRGAP_DATA_DIR "/iris.csv", true); }

// Correlated Gaussian sample with a random covariance factor.
inline Eigen::MatrixXd gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = z(gen);
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = z(gen);
  Eigen::RowVectorXd shift(d);
  for (std::size_t j = 0; j < d; ++j) shift(j) = 3.0 * z(gen);
  return (x * a).rowwise() + shift;
}

inline Dataset gaussian_mcar(std::size_t n, std::size_t d, double rate, std::uint64_t seed) {
  return apply_random(Dataset::complete(gaussian(n, d, seed)), rate, seed ^ 0x9e3779b97f4a7c15ULL);
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("corrgap_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace corrgap::test
