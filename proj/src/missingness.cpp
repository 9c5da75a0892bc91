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

#include "corrgap/missingness.hpp"

#include "corrgap/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace corrgap {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw ConfigError("Rng::below: bound must be positive");
  // 2^64 mod bound; draws below it would bias the low residues.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, double rate) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_byte = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  auto mix_u64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(v >> (8 * i)));
  };
  mix_u64(seed);
  for (char c : tag) mix_byte(static_cast<unsigned char>(c));
  mix_byte(0);
  mix_u64(std::bit_cast<std::uint64_t>(rate));
  // SplitMix64 finalizer
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

Corner parse_corner(const std::string& text) {
  if (text == "bottom-right") return Corner::BottomRight;
  if (text == "top-right") return Corner::TopRight;
  throw ConfigError("unknown corner '" + text + "' (expected bottom-right or top-right)");
}

const char* to_string(Corner corner) { return corner == Corner::TopRight ? "top-right" : "bottom-right"; }

Dataset apply_random(const Dataset& ds, double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate < 1.0)) {
    throw ConfigError("missing rate must lie in (0, 1), got " + std::to_string(rate));
  }
  if (!ds.fully_observed()) throw DataError("random masking requires a fully observed dataset");
  const std::size_t n = ds.rows();
  const std::size_t d = ds.cols();
  const std::size_t total = n * d;
  const auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(total)));
  if (n < 2 || k + 2 * d > total) {
    throw DataError("missing rate " + std::to_string(rate) + " leaves fewer than 2 observed cells per feature on a " +
                    std::to_string(n) + "x" + std::to_string(d) + " dataset");
  }

  // Cell index = column * n + row.
  std::vector<std::size_t> cells(total);
  for (std::size_t c = 0; c < total; ++c) cells[c] = c;
  Rng rng(seed);
  rng.partial_shuffle(cells, k);

  Mask observed = Mask::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d), true);
  std::vector<std::size_t> obs_count(d, n);
  for (std::size_t c = 0; c < k; ++c) {
    observed(static_cast<Eigen::Index>(cells[c] % n), static_cast<Eigen::Index>(cells[c] / n)) = false;
    --obs_count[cells[c] / n];
  }

  // Per-feature floor: swap a masked cell of the starved feature back in and
  // mask a random observed cell of a feature that can spare one.
  for (std::size_t j = 0; j < d; ++j) {
    while (obs_count[j] < 2) {
      std::vector<std::size_t> masked_rows;
      for (std::size_t i = 0; i < n; ++i)
        if (!observed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) masked_rows.push_back(i);
      const auto back = masked_rows[rng.below(masked_rows.size())];
      observed(static_cast<Eigen::Index>(back), static_cast<Eigen::Index>(j)) = true;
      ++obs_count[j];

      std::vector<std::size_t> donors;
      for (std::size_t jj = 0; jj < d; ++jj) {
        if (jj == j || obs_count[jj] < 3) continue;
        for (std::size_t i = 0; i < n; ++i)
          if (observed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj))) donors.push_back(jj * n + i);
      }
      const auto cell = donors[rng.below(donors.size())];
      observed(static_cast<Eigen::Index>(cell % n), static_cast<Eigen::Index>(cell / n)) = false;
      --obs_count[cell / n];
    }
  }
  return ds.with_cells(ds.values(), std::move(observed));
}

namespace {

// ceil(fraction * extent), ignoring floating-point excess such as
// 0.3 * 10 = 3.0000000000000004.
std::size_t block_extent(double fraction, std::size_t extent) {
  const double x = fraction * static_cast<double>(extent);
  const double nearest = std::round(x);
  const double v = std::abs(x - nearest) < 1e-9 ? nearest : std::ceil(x);
  return std::clamp<std::size_t>(static_cast<std::size_t>(v), 1, extent);
}

}  // namespace

std::vector<std::size_t> monotone_block_features(const ImageShape& shape, double block_fraction, Corner corner) {
  if (!(block_fraction > 0.0 && block_fraction < 1.0)) {
    throw ConfigError("block fraction must lie in (0, 1), got " + std::to_string(block_fraction));
  }
  const std::size_t bh = block_extent(block_fraction, shape.height);
  const std::size_t bw = block_extent(block_fraction, shape.width);
  const std::size_t r0 = corner == Corner::BottomRight ? shape.height - bh : 0;
  std::vector<std::size_t> features;
  features.reserve(bh * bw);
  for (std::size_t r = r0; r < r0 + bh; ++r)
    for (std::size_t c = shape.width - bw; c < shape.width; ++c) features.push_back(r * shape.width + c);
  return features;
}

Dataset apply_monotone_block(const Dataset& ds, double block_fraction, double affected_row_fraction,
                             std::uint64_t seed, Corner corner) {
  if (!ds.image_shape()) throw DataError("monotone block masking requires an image shape (--image-shape HxW)");
  if (!(affected_row_fraction > 0.0 && affected_row_fraction <= 1.0)) {
    throw ConfigError("affected row fraction must lie in (0, 1], got " + std::to_string(affected_row_fraction));
  }
  if (!ds.fully_observed()) throw DataError("monotone block masking requires a fully observed dataset");
  const auto features = monotone_block_features(*ds.image_shape(), block_fraction, corner);

  const std::size_t n = ds.rows();
  auto affected = static_cast<std::size_t>(std::llround(affected_row_fraction * static_cast<double>(n)));
  affected = std::clamp<std::size_t>(affected, 1, n);
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  Rng rng(seed);
  rng.partial_shuffle(rows, affected);
  rows.resize(affected);
  std::sort(rows.begin(), rows.end());

  Mask observed = ds.observed();
  for (auto i : rows)
    for (auto f : features) observed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = false;
  return ds.with_cells(ds.values(), std::move(observed));
}

Dataset apply_missing(const Dataset& ds, const MissingSpec& spec) {
  if (spec.pattern == MissingPattern::RandomRate) return apply_random(ds, spec.rate, spec.seed);
  return apply_monotone_block(ds, spec.block_fraction, spec.affected_row_fraction, spec.seed, spec.corner);
}

double missing_rate(const Dataset& ds) {
  const auto total = ds.rows() * ds.cols();
  if (total == 0) return 0.0;
  return static_cast<double>((!ds.observed()).count()) / static_cast<double>(total);
}

}  // namespace corrgap
