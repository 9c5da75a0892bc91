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

#include <Eigen/Dense>

#include <string>

namespace corrgap::detail {

/// Per-feature mean over observed cells. Throws DataError naming the first
/// feature with fewer than `min_observed` observed cells.
Eigen::VectorXd observed_means(const Dataset& ds, std::size_t min_observed, const char* who);

/// Observed cells copied, missing cells set to their feature's mean.
Eigen::MatrixXd mean_filled(const Dataset& ds, const Eigen::VectorXd& means);

/// Writes observed cells of `ds` over `x`.
void restore_observed(const Dataset& ds, Eigen::MatrixXd& x);

inline Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace corrgap::detail
