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

#include "corrgap/cubic.hpp"

#include "corrgap/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace corrgap {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Poly3 {
  double a, b, c, e;

  [[nodiscard]] double eval(double x) const { return ((a * x + b) * x + c) * x + e; }
  [[nodiscard]] double deriv(double x) const { return (3.0 * a * x + 2.0 * b) * x + c; }
  // Rounding-error bound of Horner evaluation at x.
  [[nodiscard]] double eval_noise(double x) const {
    const double ax = std::abs(x);
    return 8.0 * kEps * (((std::abs(a) * ax + std::abs(b)) * ax + std::abs(c)) * ax + std::abs(e));
  }
};

double polish(const Poly3& p, double x) {
  double fx = p.eval(x);
  for (int it = 0; it < 12 && fx != 0.0; ++it) {
    const double dfx = p.deriv(x);
    if (dfx == 0.0 || !std::isfinite(dfx)) break;
    double step = fx / dfx;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      const double cand = x - step;
      const double fc = p.eval(cand);
      if (std::abs(fc) < std::abs(fx)) {
        x = cand;
        fx = fc;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return x;
}

void quadratic_roots(double a, double b, double c, std::vector<double>& out) {
  if (a == 0.0) {
    if (b != 0.0) out.push_back(-c / b);
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  if (disc == 0.0) {
    out.push_back(-b / (2.0 * a));
    return;
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  out.push_back(q / a);
  if (q != 0.0) out.push_back(c / q);
}

}  // namespace

std::vector<double> solve_cubic(double a, double b, double c, double e) {
  if (a == 0.0 && b == 0.0 && c == 0.0 && e == 0.0) {
    throw NumericError("solve_cubic: all coefficients are zero");
  }
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(e)});
  const Poly3 p{a / scale, b / scale, c / scale, e / scale};

  std::vector<double> cand;
  if (p.a == 0.0) {
    quadratic_roots(p.b, p.c, p.e, cand);
  } else {
    const double A = p.b / p.a;
    const double B = p.c / p.a;
    const double C = p.e / p.a;
    const double Q = (A * A - 3.0 * B) / 9.0;
    const double R = (A * (2.0 * A * A - 9.0 * B) + 27.0 * C) / 54.0;
    const double Q3 = Q * Q * Q;
    const double R2 = R * R;
    const double shift = A / 3.0;
    if (R2 < Q3) {
      const double theta = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
      const double m = -2.0 * std::sqrt(Q);
      cand.push_back(m * std::cos(theta / 3.0) - shift);
      cand.push_back(m * std::cos((theta + 2.0 * std::numbers::pi) / 3.0) - shift);
      cand.push_back(m * std::cos((theta - 2.0 * std::numbers::pi) / 3.0) - shift);
    } else {
      const double S = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(R2 - Q3)), R);
      const double T = S != 0.0 ? Q / S : 0.0;
      cand.push_back(S + T - shift);
    }
    // Multiple roots sit on critical points; the closed forms above can lose
    // them to rounding, so test those too.
    std::vector<double> crit;
    quadratic_roots(3.0 * p.a, 2.0 * p.b, p.c, crit);
    for (double x : crit) {
      const double xp = polish(p, x);
      if (std::abs(p.eval(xp)) <= 16.0 * p.eval_noise(xp)) cand.push_back(xp);
    }
  }

  for (double& x : cand) x = polish(p, x);
  std::sort(cand.begin(), cand.end());

  std::vector<double> roots;
  for (double x : cand) {
    if (!std::isfinite(x)) continue;
    if (!roots.empty()) {
      const double prev = roots.back();
      const double mid = 0.5 * (prev + x);
      if (x == prev || std::abs(p.eval(mid)) <= 16.0 * p.eval_noise(mid)) {
        if (std::abs(p.eval(x)) < std::abs(p.eval(prev))) roots.back() = x;
        continue;
      }
    }
    roots.push_back(x);
  }
  return roots;
}

}  // namespace corrgap
