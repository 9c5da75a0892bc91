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

#include <vector>

namespace corrgap {

/// Distinct real roots of a*x^3 + b*x^2 + c*x + e, ascending.
///
/// Closed-form seeds (trigonometric / Cardano) are polished by damped Newton
/// iterations. Roots that coincide after polishing are reported once.
/// Leading zero coefficients reduce to the quadratic or linear case; all
/// coefficients zero throws NumericError.
std::vector<double> solve_cubic(double a, double b, double c, double e);

}  // namespace corrgap
