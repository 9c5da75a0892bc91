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

namespace corrgap {
namespace {
thread_local std::optional<std::chrono::steady_clock::time_point> t_deadline;
}

DeadlineScope::DeadlineScope(std::chrono::steady_clock::duration budget) : previous_(t_deadline) {
  t_deadline = std::chrono::steady_clock::now() + budget;
}

DeadlineScope::~DeadlineScope() { t_deadline = previous_; }

void check_deadline() {
  if (t_deadline && std::chrono::steady_clock::now() > *t_deadline) {
    throw TimeoutError("estimator exceeded its time budget");
  }
}

}  // namespace corrgap
