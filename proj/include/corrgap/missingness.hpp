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

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace corrgap {

/// Reproducible generator: std::mt19937_64 (output sequence fixed by the
/// C++ standard) with bounded integers drawn by rejection sampling, so the
/// stream does not depend on the standard library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform real in [0, 1) with 53 random bits.
  double uniform();

  /// The first `count` entries of `items` become a uniform sample without
  /// replacement (partial Fisher-Yates).
  template <typename T>
  void partial_shuffle(std::vector<T>& items, std::size_t count) {
    for (std::size_t i = 0; i < count && i + 1 < items.size(); ++i) {
      auto j = i + static_cast<std::size_t>(below(items.size() - i));
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Stable 64-bit seed derivation (FNV-1a over the parts, then a SplitMix64
/// finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, double rate);

enum class MissingPattern { RandomRate, MonotoneBlock };
enum class Corner { BottomRight, TopRight };

Corner parse_corner(const std::string& text);
const char* to_string(Corner corner);

struct MissingSpec {
  MissingPattern pattern = MissingPattern::RandomRate;
  double rate = 0.1;
  double block_fraction = 0.5;
  double affected_row_fraction = 0.5;
  Corner corner = Corner::BottomRight;
  std::uint64_t seed = 0;
};

/// Masks exactly round(rate * n * d) cells uniformly without replacement,
/// then repairs any feature left with fewer than two observed cells by
/// swapping masked cells back in for cells from well-observed features.
Dataset apply_random(const Dataset& ds, double rate, std::uint64_t seed);

/// Removes the same pixel block from a seeded subset of rows. The block
/// spans the last (or first, for TopRight) ceil(block_fraction * H) image
/// rows and the last ceil(block_fraction * W) image columns.
Dataset apply_monotone_block(const Dataset& ds, double block_fraction, double affected_row_fraction,
                             std::uint64_t seed, Corner corner = Corner::BottomRight);

/// Feature indices of the block removed by apply_monotone_block, ascending.
std::vector<std::size_t> monotone_block_features(const ImageShape& shape, double block_fraction,
                                                 Corner corner);

Dataset apply_missing(const Dataset& ds, const MissingSpec& spec);

/// Fraction of cells that are missing.
double missing_rate(const Dataset& ds);

}  // namespace corrgap
