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

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

namespace corrgap {

// Error taxonomy. Each class maps onto one CLI / C API exit code.

/// Invalid configuration, arguments, or usage (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed, inconsistent, or unreadable data (exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside an estimator (exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An estimator exceeded the deadline installed by a DeadlineScope.
class TimeoutError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Installs a per-thread deadline for the lifetime of the scope.
/// Long-running estimator loops call check_deadline() and throw
/// TimeoutError once it has passed. Scopes nest; the innermost wins.
class DeadlineScope {
 public:
  explicit DeadlineScope(std::chrono::steady_clock::duration budget);
  ~DeadlineScope();
  DeadlineScope(const DeadlineScope&) = delete;
  DeadlineScope& operator=(const DeadlineScope&) = delete;

 private:
  std::optional<std::chrono::steady_clock::time_point> previous_;
};

void check_deadline();

}  // namespace corrgap
