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

// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
#include "corrgap/error.hpp"
#include "corrgap/estimators.hpp"
#include "corrgap/metrics.hpp"
#include "corrgap/missingness.hpp"
#include "corrgap/pipeline.hpp"
#include "corrgap/render.hpp"
#include "test_util.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <regex>
#include <set>

using namespace corrgap;
namespace fs = std::filesystem;

namespace {

constexpr double kEquivTol = 1e-8;      // AC1
constexpr double kEquivSeconds = 5.0;   // AC1
constexpr int kGridPoints = 1000000;    // AC2
constexpr double kGridSeconds = 60.0;   // AC2
constexpr double kMonotoneTol = 1e-9;   // AC3, AC4
constexpr double kRankOneTol = 1e-6;    // AC4
constexpr double kTrendSeconds = 30.0;  // AC5
constexpr double kNullTol = 1e-12;      // AC8
constexpr double kRunSeconds = 120.0;   // AC10

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
  std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void run(const char* id, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(id, ok, detail);
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

const std::vector<MethodKind> kBuiltIn{MethodKind::Mean,       MethodKind::Knn,       MethodKind::Mice, MethodKind::Em,
                                       MethodKind::SoftImpute, MethodKind::ImputePca, MethodKind::Dper};

double mcar_rmse(const Dataset& complete, const CorrelationMatrix& truth, MethodKind kind, double rate,
                 std::uint64_t seed) {
  const auto masked = apply_random(complete, rate, derive_seed(seed, "mask", rate));
  const auto input = normalize(masked, NormalizationMode::MinMax01).first;
  return rmse_corr(run_method(input, default_method_config(kind), seed).correlation, truth);
}

}  // namespace

int main() {
  const auto iris = corrgap::test::iris();
  const auto truth = ground_truth_correlation(iris);

  run("AC1 complete-data equivalence", [&] {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (auto kind : kBuiltIn) worst = std::max(worst, rmse_corr(run_method(iris, default_method_config(kind), 0).correlation, truth));
    const double secs = seconds_since(t0);
    return std::pair{worst < kEquivTol && secs < kEquivSeconds,
                     "max RMSE " + fmt("%.3g", worst) + " (< 1e-8), " + fmt("%.2f", secs) + " s (< 5 s)"};
  });

  run("AC2 DPER cubic vs likelihood grid", [&] {
    const auto t0 = Clock::now();
    int bad = 0;
    double worst_steps = 0.0;
    for (std::uint64_t inst = 0; inst < 200; ++inst) {
      const auto ds = corrgap::test::gaussian_mcar(100, 2, 0.3, 5000 + inst);
      // Sufficient statistics from their definition.
      double mu[2], var[2];
      for (int f = 0; f < 2; ++f) {
        double s = 0, q = 0;
        int c = 0;
        for (std::size_t r = 0; r < ds.rows(); ++r)
          if (ds.is_observed(r, f)) s += ds.value(r, f), ++c;
        mu[f] = s / c;
        for (std::size_t r = 0; r < ds.rows(); ++r)
          if (ds.is_observed(r, f)) q += std::pow(ds.value(r, f) - mu[f], 2);
        var[f] = q / c;
      }
      double s11 = 0, s22 = 0, s12 = 0, m = 0;
      for (std::size_t r = 0; r < ds.rows(); ++r) {
        if (!ds.is_observed(r, 0) || !ds.is_observed(r, 1)) continue;
        const double x = ds.value(r, 0) - mu[0], y = ds.value(r, 1) - mu[1];
        s11 += x * x, s22 += y * y, s12 += x * y, m += 1;
      }
      const double a = var[0], b = var[1], lim = std::sqrt(a * b);
      const double step = 2 * lim / kGridPoints;
      double best = 0, best_ll = -INFINITY;
      for (int k = 1; k < kGridPoints; ++k) {
        const double s = -lim + k * step;
        const double det = a * b - s * s;
        const double ll = -0.5 * m * std::log(det) - (b * s11 - 2 * s * s12 + a * s22) / (2 * det);
        if (ll > best_ll) best_ll = ll, best = s;
      }
      const double got = dper_estimate(ds).cov(0, 1);
      const double steps = std::abs(got - best) / step;
      worst_steps = std::max(worst_steps, steps);
      if (steps > 1.0) ++bad;
    }
    const double secs = seconds_since(t0);
    return std::pair{bad == 0 && secs < kGridSeconds, std::to_string(200 - bad) + "/200 within one grid step (worst " +
                                                          fmt("%.3f", worst_steps) + " steps), " + fmt("%.1f", secs) +
                                                          " s (< 60 s)"};
  });

  run("AC3 EM log-likelihood monotone", [&] {
    int bad = 0;
    double worst = 0.0;
    for (std::uint64_t inst = 0; inst < 50; ++inst) {
      const auto r = em_estimate(corrgap::test::gaussian_mcar(100, 5, 0.3, 7000 + inst));
      for (std::size_t t = 1; t < r.loglik_trace.size(); ++t) {
        const double drop = r.loglik_trace[t - 1] - r.loglik_trace[t];
        worst = std::max(worst, drop);
        if (drop > kMonotoneTol) {
          ++bad;
          break;
        }
      }
    }
    return std::pair{bad == 0, std::to_string(50 - bad) + "/50 instances nondecreasing (largest drop " +
                                   fmt("%.3g", worst) + ", tol 1e-9)"};
  });

  run("AC4 SoftImpute objective monotone + rank-1 completion", [&] {
    int bad = 0;
    for (std::uint64_t inst = 0; inst < 50; ++inst) {
      const auto r = impute_softimpute_traced(corrgap::test::gaussian_mcar(100, 5, 0.3, 7000 + inst));
      for (std::size_t t = 1; t < r.objective_trace.size(); ++t)
        if (r.objective_trace[t] > r.objective_trace[t - 1] + kMonotoneTol * std::max(1.0, r.objective_trace[t - 1])) {
          ++bad;
          break;
        }
    }
    SoftImputeParams p;
    p.lambda_frac = 0.0;
    p.max_rank = 1;
    p.max_iter = 10000;
    p.tol = 1e-14;
    const double z = impute_softimpute(corrgap::test::make({{1, 2}, {2, corrgap::test::kNaN}}), p).values(1, 1);
    const bool exact = std::abs(z - 4.0) < kRankOneTol;
    return std::pair{bad == 0 && exact, std::to_string(50 - bad) + "/50 nonincreasing; [[1,2],[2,?]] -> " +
                                            fmt("%.9f", z) + " (truth 4, tol 1e-6)"};
  });

  run("AC5 mean-imputation RMSE rises with rate", [&] {
    const auto t0 = Clock::now();
    const std::vector<double> rates{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> avg;
    for (double rate : rates) {
      double s = 0;
      for (std::uint64_t seed = 0; seed < 10; ++seed) s += mcar_rmse(iris, truth, MethodKind::Mean, rate, seed);
      avg.push_back(s / 10);
    }
    bool inc = true;
    std::string detail;
    for (std::size_t k = 0; k < avg.size(); ++k) {
      if (k > 0) inc &= avg[k] > avg[k - 1];
      detail += fmt("%.4f ", avg[k]);
    }
    const double secs = seconds_since(t0);
    return std::pair{inc && secs < kTrendSeconds, "averages " + detail + "(" + fmt("%.2f", secs) + " s)"};
  });

  run("AC6 DPER beats mean imputation at 50%", [&] {
    double dper = 0, mean = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      dper += mcar_rmse(iris, truth, MethodKind::Dper, 0.5, seed) / 10;
      mean += mcar_rmse(iris, truth, MethodKind::Mean, 0.5, seed) / 10;
    }
    return std::pair{dper < mean, "DPER " + fmt("%.4f", dper) + " vs Mean " + fmt("%.4f", mean)};
  });

  run("AC7 color exactness", [&] {
    const auto cm = correlation_colormap();
    auto is = [&](std::optional<double> v, int r, int g, int b) {
      const auto c = map_color(v, cm);
      return c.r == r && c.g == g && c.b == b;
    };
    const bool ok = is(-1.0, 0, 0, 255) && is(0.0, 255, 255, 255) && is(1.0, 255, 0, 0) && is(0.5, 255, 128, 128) &&
                    is(std::nullopt, 128, 128, 128);
    return std::pair{ok, std::string("-1, 0, +1, 0.5, null -> ") + hex_color(map_color(-1.0, cm)) + " " +
                             hex_color(map_color(0.0, cm)) + " " + hex_color(map_color(1.0, cm)) + " " +
                             hex_color(map_color(0.5, cm)) + " " + hex_color(map_color(std::nullopt, cm))};
  });

  run("AC8 null exclusion", [&] {
    Eigen::MatrixXd with(150, 5);
    with << iris.values().col(0), iris.values().col(1), Eigen::VectorXd::Constant(150, 3.0), iris.values().col(2),
        iris.values().col(3);
    const auto full_with = Dataset::complete(with);
    const auto masked = apply_random(full_with, 0.3, 11);
    Eigen::MatrixXd mv(150, 4);
    Mask mo(150, 4);
    for (int c = 0, k = 0; c < 5; ++c) {
      if (c == 2) continue;
      mv.col(k) = masked.values().col(c);
      mo.col(k++) = masked.observed().col(c);
    }
    const auto corr_with = correlate(impute_mean(masked));
    const double a = rmse_corr(corr_with, ground_truth_correlation(full_with));
    const double b = rmse_corr(correlate(impute_mean(Dataset(mv, mo))), truth);
    // Gray row/column in the rendered correlation panel.
    const auto svg = render_heatmap(corr_with, correlation_colormap(), "with constant feature", "");
    const std::regex cell("<rect x=\"(\\d+)\" y=\"(\\d+)\" width=\"12\" height=\"12\" fill=\"(#[0-9a-f]{6})\"/>");
    std::set<std::pair<int, int>> gray;
    std::vector<std::tuple<int, int, std::string>> cells;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cell); it != std::sregex_iterator(); ++it)
      cells.emplace_back(std::stoi((*it)[1]), std::stoi((*it)[2]), (*it)[3]);
    bool layout_ok = cells.size() == 25;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const bool in_null = k / 5 == 2 || k % 5 == 2;
      layout_ok &= (std::get<2>(cells[k]) == "#808080") == in_null;
    }
    return std::pair{std::abs(a - b) < kNullTol && layout_ok,
                     "RMSE with " + fmt("%.15f", a) + " vs deleted " + fmt("%.15f", b) + ", gray cross " +
                         (layout_ok ? "present" : "missing")};
  });

  run("AC9 dense rank", [&] {
    const auto r = dense_rank({89, 72, 72, 65, 94, 89, 72});
    auto sorted = r;
    std::sort(sorted.begin(), sorted.end());
    const bool ok = r == std::vector<int>{3, 2, 2, 1, 4, 3, 2} && sorted == std::vector<int>{1, 2, 2, 2, 3, 3, 4};
    std::string s;
    for (int x : r) s += std::to_string(x) + " ";
    return std::pair{ok, "ranks " + s};
  });

  run("AC10 pipeline determinism and artifacts", [&] {
    corrgap::test::TempDir dir("acceptance");
    nlohmann::json methods = nlohmann::json::array();
    for (auto kind : kBuiltIn) methods.push_back({{"method", to_string(kind)}});
    corrgap::test::spit(dir / "cfg.json",
                        nlohmann::json{{"dataset", CORRGAP_DATA_DIR "/iris.csv"},
                                       {"seed", 2024},
                                       {"pattern", {{"type", "random"}, {"rates", {0.1, 0.2, 0.3, 0.4, 0.5}}}},
                                       {"methods", methods}}
                            .dump());
    auto invoke = [&](const std::string& out) {
      const std::string cmd = std::string("\"") + CORRGAP_BIN + "\" run \"" + (dir / "cfg.json").string() +
                              "\" --output-dir \"" + (dir / out).string() + "\"";
      const int st = std::system(cmd.c_str());
      return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    };
    const auto t0 = Clock::now();
    const int rc1 = invoke("a");
    const double secs = seconds_since(t0);
    const int rc2 = invoke("b");
    std::size_t svg = 0, js = 0;
    bool same = rc1 == 0 && rc2 == 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
      const auto ext = e.path().extension();
      svg += ext == ".svg";
      js += ext == ".json";
      if (ext == ".json") {
        auto strip = [](nlohmann::json j) {
          for (auto& m : j["methods"])
            for (auto& r : m["rates"]) r.erase("wall_time_seconds");
          j["config"].erase("output_dir");
          return j;
        };
        same &= strip(nlohmann::json::parse(corrgap::test::slurp(e.path()))) ==
                strip(nlohmann::json::parse(corrgap::test::slurp(dir / "b" / e.path().filename())));
      } else {
        same &= corrgap::test::slurp(e.path()) == corrgap::test::slurp(dir / "b" / e.path().filename());
      }
    }
    return std::pair{same && svg == 6 && js == 1 && secs < kRunSeconds,
                     std::to_string(svg) + " SVG + " + std::to_string(js) + " JSON, rerun " +
                         (same ? "identical" : "DIFFERS") + ", " + fmt("%.2f", secs) + " s (< 120 s)"};
  });

  run("AC11 monotone block generator", [&] {
    Eigen::MatrixXd v = Eigen::MatrixXd::Random(30, 784);
    const Dataset ds(v, Mask::Constant(30, 784, true), {}, ImageShape{28, 28});
    const auto out = apply_monotone_block(ds, 0.5, 0.5, 3, Corner::BottomRight);
    std::set<std::set<std::size_t>> sets;
    std::size_t affected = 0;
    bool counts = true;
    for (std::size_t i = 0; i < 30; ++i) {
      std::set<std::size_t> miss;
      for (std::size_t j = 0; j < 784; ++j)
        if (!out.is_observed(i, j)) miss.insert(j);
      if (miss.empty()) continue;
      ++affected;
      counts &= miss.size() == 196;
      sets.insert(miss);
    }
    return std::pair{counts && sets.size() == 1 && affected == 15,
                     std::to_string(affected) + " affected rows, 196 features each: " + (counts ? "yes" : "no") +
                         ", distinct feature sets: " + std::to_string(sets.size())};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
