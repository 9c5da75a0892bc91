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

#include "corrgap/pipeline.hpp"

#include "corrgap/error.hpp"
#include "corrgap/render.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace corrgap {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// JSON helpers

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <typename T>
T get_required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing required key '" + std::string(key) + "' in " + where);
  return get_or<T>(j, key, T{}, where);
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string rate_tag(double rate) { return fmt("%g", rate); }
std::string pct(double rate) { return fmt("%g", rate * 100.0) + "%"; }

std::string slug(const std::string& label) {
  std::string s;
  for (char c : label) s.push_back(std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_');
  return s.empty() ? "method" : s;
}

std::string correlation_file(std::size_t method_index, const std::string& label, std::size_t rate_index) {
  return "corr_m" + std::to_string(method_index) + "_" + slug(label) + "_r" + std::to_string(rate_index) + ".csv";
}

std::string masked_file(std::size_t rate_index, double rate) {
  return "masked_r" + std::to_string(rate_index) + "_" + rate_tag(rate) + ".csv";
}

constexpr const char* kTruthFile = "truth_correlation.csv";
constexpr const char* kReportFile = "report.json";

// ---------------------------------------------------------------------------
// Figures

struct FigureInputs {
  CorrelationMatrix truth;
  std::vector<double> rates;
  std::vector<MethodResult> ordered;  // panel order, all ok at the max rate
  FigureOptions options;
  MissingPattern pattern = MissingPattern::RandomRate;
};

struct FigureOutputs {
  std::map<std::string, std::string> files;
  std::map<std::string, double> domains;
};

std::string sublabel(const RateResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%d) RMSE: %.4f", r.rank, r.rmse);
  return buf;
}

MaskedMatrix zero_like(const CorrelationMatrix& truth) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(truth.rows(), truth.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      if (truth.null_mask(i, j)) z(i, j) = std::numeric_limits<double>::quiet_NaN();
  return MaskedMatrix(std::move(z), truth.null_mask);
}

enum class PanelKind { Correlation, AbsDiff, SignedDiff };

// Builds a grid of ground truth + ordered methods over `rates`, computing
// the figure-wide difference domain when needed.
FigureSpec build_grid(const FigureInputs& in, const std::vector<double>& rates, PanelKind kind,
                      const std::string& title, double* domain_out) {
  FigureSpec spec;
  spec.title = title;
  spec.rows = static_cast<int>(rates.size());
  spec.cols = static_cast<int>(in.ordered.size()) + 1;
  spec.cell_px = in.options.cell_px;

  std::vector<std::optional<MaskedMatrix>> mats;
  double domain = 0.0;
  for (double rate : rates) {
    mats.emplace_back(kind == PanelKind::Correlation ? MaskedMatrix(in.truth) : zero_like(in.truth));
    for (const auto& m : in.ordered) {
      auto it = m.per_rate.find(rate);
      if (it == m.per_rate.end() || !it->second.ok() || !it->second.correlation) {
        mats.emplace_back(std::nullopt);
        continue;
      }
      const auto& est = *it->second.correlation;
      switch (kind) {
        case PanelKind::Correlation: mats.emplace_back(est); break;
        case PanelKind::AbsDiff: mats.emplace_back(local_abs_diff(est, in.truth)); break;
        case PanelKind::SignedDiff: mats.emplace_back(local_signed_diff(est, in.truth)); break;
      }
      if (kind != PanelKind::Correlation) domain = std::max(domain, max_abs(*mats.back()));
    }
  }
  if (in.options.diff_domain == DiffDomain::Fixed || !(domain > 0.0)) domain = 1.0;
  if (domain_out) *domain_out = domain;

  ColorMap cmap;
  switch (kind) {
    case PanelKind::Correlation:
      cmap = correlation_colormap();
      spec.colorbar_label = "correlation";
      break;
    case PanelKind::AbsDiff:
      cmap = difference_colormap(domain);
      spec.colorbar_label = "|estimate - truth|";
      break;
    case PanelKind::SignedDiff:
      cmap = correlation_colormap(-domain, domain);
      spec.colorbar_label = "estimate - truth";
      break;
  }
  spec.colorbar = cmap;

  std::size_t slot = 0;
  for (double rate : rates) {
    const std::string suffix = " @ " + pct(rate);
    spec.panels.push_back(Panel{*mats[slot++], cmap, "Ground truth" + suffix, ""});
    for (const auto& m : in.ordered) {
      auto& mat = mats[slot++];
      if (!mat) {
        spec.panels.emplace_back(std::nullopt);
        continue;
      }
      const auto& rr = m.per_rate.at(rate);
      spec.panels.push_back(
          Panel{std::move(*mat), cmap, m.method + suffix, kind == PanelKind::Correlation ? "" : sublabel(rr)});
    }
  }
  return spec;
}

FigureOutputs render_figures(const FigureInputs& in, const fs::path& out_dir) {
  FigureOutputs out;
  const double max_rate = in.rates.back();
  const std::vector<double> last{max_rate};
  const std::string axis = in.pattern == MissingPattern::RandomRate ? "missing rate" : "block fraction";

  auto emit = [&](const std::string& key, const std::string& file, const std::string& svg) {
    write_file(out_dir / file, svg);
    out.files[key] = file;
  };

  double d_all = 0.0, d_abs = 0.0, d_signed = 0.0;
  emit("correlation_all_rates", "fig1_correlation_all_rates.svg",
       render_grid(build_grid(in, in.rates, PanelKind::Correlation, "Correlation heatmaps across " + axis + "s",
                              nullptr)));
  emit("abs_diff_all_rates", "fig2_local_rmse_diff_all_rates.svg",
       render_grid(build_grid(in, in.rates, PanelKind::AbsDiff,
                              "Local RMSE difference heatmaps across " + axis + "s", &d_all)));
  emit("correlation_max_rate", "fig3_correlation_max_rate.svg",
       render_grid(build_grid(in, last, PanelKind::Correlation, "Correlation heatmaps at " + pct(max_rate),
                              nullptr)));
  emit("abs_diff_max_rate", "fig4_local_rmse_diff_max_rate.svg",
       render_grid(build_grid(in, last, PanelKind::AbsDiff, "Local RMSE difference heatmaps at " + pct(max_rate),
                              &d_abs)));
  emit("signed_diff_max_rate", "fig5_signed_diff_max_rate.svg",
       render_grid(build_grid(in, last, PanelKind::SignedDiff,
                              "Local difference (estimate - truth) heatmaps at " + pct(max_rate), &d_signed)));

  std::vector<MethodResult> complete;
  for (const auto& m : in.ordered)
    if (std::all_of(in.rates.begin(), in.rates.end(), [&](double r) { return m.ok_at(r); })) complete.push_back(m);
  emit("rmse_lines", "fig6_rmse_lines.svg",
       render_rmse_lines(complete, in.rates, "Correlation RMSE vs " + axis, axis));

  out.domains["abs_all_rates"] = d_all;
  out.domains["abs_max_rate"] = d_abs;
  out.domains["signed_max_rate"] = d_signed;
  return out;
}

std::string error_text(const std::exception& e) {
  if (dynamic_cast<const TimeoutError*>(&e)) return std::string("timeout: ") + e.what();
  if (dynamic_cast<const NumericError*>(&e)) return std::string("numeric: ") + e.what();
  if (dynamic_cast<const DataError*>(&e)) return std::string("data: ") + e.what();
  if (dynamic_cast<const ConfigError*>(&e)) return std::string("config: ") + e.what();
  return std::string("error: ") + e.what();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

MethodConfig parse_method_config(const json& j, const fs::path& base_dir) {
  const std::string where = "method entry";
  if (!j.is_object()) throw ConfigError("method entry must be a JSON object");
  const auto kind = parse_method_kind(get_required<std::string>(j, "method", where));
  MethodConfig m = default_method_config(kind);
  const std::string w = "method '" + std::string(to_string(kind)) + "'";
  switch (kind) {
    case MethodKind::Mean:
    case MethodKind::Dper: reject_unknown_keys(j, {"method", "label"}, w); break;
    case MethodKind::Knn: {
      reject_unknown_keys(j, {"method", "label", "k"}, w);
      KnnParams p;
      p.k = get_or<int>(j, "k", p.k, w);
      if (p.k < 1) throw ConfigError("knn: k must be at least 1");
      m.params = p;
      break;
    }
    case MethodKind::Mice: {
      reject_unknown_keys(j, {"method", "label", "max_iter", "tol", "ridge"}, w);
      MiceParams p;
      p.max_iter = get_or<int>(j, "max_iter", p.max_iter, w);
      p.tol = get_or<double>(j, "tol", p.tol, w);
      p.ridge = get_or<double>(j, "ridge", p.ridge, w);
      m.params = p;
      break;
    }
    case MethodKind::Em: {
      reject_unknown_keys(j, {"method", "label", "max_iter", "tol", "ridge"}, w);
      EmParams p;
      p.max_iter = get_or<int>(j, "max_iter", p.max_iter, w);
      p.tol = get_or<double>(j, "tol", p.tol, w);
      p.ridge = get_or<double>(j, "ridge", p.ridge, w);
      m.params = p;
      break;
    }
    case MethodKind::SoftImpute: {
      reject_unknown_keys(j, {"method", "label", "lambda_frac", "max_iter", "tol", "max_rank"}, w);
      SoftImputeParams p;
      p.lambda_frac = get_or<double>(j, "lambda_frac", p.lambda_frac, w);
      p.max_iter = get_or<int>(j, "max_iter", p.max_iter, w);
      p.tol = get_or<double>(j, "tol", p.tol, w);
      p.max_rank = get_or<int>(j, "max_rank", p.max_rank, w);
      if (!(p.lambda_frac >= 0.0 && p.lambda_frac < 1.0)) throw ConfigError("softimpute: lambda_frac must lie in [0, 1)");
      m.params = p;
      break;
    }
    case MethodKind::ImputePca: {
      reject_unknown_keys(j, {"method", "label", "n_components", "max_iter", "tol"}, w);
      PcaParams p;
      p.n_components = get_or<int>(j, "n_components", p.n_components, w);
      p.max_iter = get_or<int>(j, "max_iter", p.max_iter, w);
      p.tol = get_or<double>(j, "tol", p.tol, w);
      m.params = p;
      break;
    }
    case MethodKind::External: {
      reject_unknown_keys(j, {"method", "label", "files", "has_header"}, w);
      if (!j.contains("label")) throw ConfigError("external method needs a 'label' (e.g. \"GAIN\")");
      for (const auto& f : get_or<std::vector<std::string>>(j, "files", {}, w))
        m.external_files.push_back(resolve(base_dir, f));
      m.external_has_header = get_or<bool>(j, "has_header", true, w);
      break;
    }
  }
  if (j.contains("label")) m.label = get_or<std::string>(j, "label", m.label, w);
  if (m.label.empty()) throw ConfigError("method label must not be empty");
  return m;
}

json method_config_to_json(const MethodConfig& m) {
  json j;
  j["method"] = to_string(m.kind);
  j["label"] = m.label;
  std::visit(
      [&j](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, KnnParams>) {
          j["k"] = p.k;
        } else if constexpr (std::is_same_v<P, MiceParams> || std::is_same_v<P, EmParams>) {
          j["max_iter"] = p.max_iter;
          j["tol"] = p.tol;
          j["ridge"] = p.ridge;
        } else if constexpr (std::is_same_v<P, SoftImputeParams>) {
          j["lambda_frac"] = p.lambda_frac;
          j["max_iter"] = p.max_iter;
          j["tol"] = p.tol;
          j["max_rank"] = p.max_rank;
        } else if constexpr (std::is_same_v<P, PcaParams>) {
          j["n_components"] = p.n_components;
          j["max_iter"] = p.max_iter;
          j["tol"] = p.tol;
        }
      },
      m.params);
  if (m.kind == MethodKind::External) {
    json files = json::array();
    for (const auto& f : m.external_files) files.push_back(f.generic_string());
    j["files"] = files;
    j["has_header"] = m.external_has_header;
  }
  return j;
}

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  const std::string where = "config";
  reject_unknown_keys(j,
                      {"dataset", "has_header", "image_shape", "normalization", "normalize_on_complete", "pattern",
                       "methods", "seed", "output_dir", "figures", "workers", "timeout_seconds"},
                      where);
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  cfg.dataset = get_required<std::string>(j, "dataset", where);
  cfg.has_header = get_or<bool>(j, "has_header", cfg.has_header, where);
  if (j.contains("image_shape")) cfg.image_shape = parse_image_shape(get_or<std::string>(j, "image_shape", "", where));
  cfg.normalization = parse_normalization_mode(get_or<std::string>(j, "normalization", "minmax", where));
  cfg.normalize_on_complete = get_or<bool>(j, "normalize_on_complete", false, where);
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0, where);
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir.string(), where);
  cfg.workers = get_or<int>(j, "workers", 0, where);
  cfg.timeout_seconds = get_or<double>(j, "timeout_seconds", cfg.timeout_seconds, where);
  if (cfg.workers < 0) throw ConfigError("workers must be non-negative");
  if (!(cfg.timeout_seconds > 0.0)) throw ConfigError("timeout_seconds must be positive");

  const json pattern = j.contains("pattern") ? j.at("pattern") : json::object({{"type", "random"}});
  const auto type = get_or<std::string>(pattern, "type", "random", "pattern");
  if (type == "random") {
    reject_unknown_keys(pattern, {"type", "rates"}, "pattern");
    cfg.pattern = MissingPattern::RandomRate;
    cfg.rates = get_or<std::vector<double>>(pattern, "rates", {0.1, 0.2, 0.3, 0.4, 0.5}, "pattern");
  } else if (type == "monotone") {
    reject_unknown_keys(pattern, {"type", "block_fractions", "affected_row_fraction", "corner"}, "pattern");
    cfg.pattern = MissingPattern::MonotoneBlock;
    cfg.rates = get_or<std::vector<double>>(pattern, "block_fractions", {0.4, 0.5, 0.6}, "pattern");
    cfg.affected_row_fraction = get_or<double>(pattern, "affected_row_fraction", 0.5, "pattern");
    cfg.corner = parse_corner(get_or<std::string>(pattern, "corner", "bottom-right", "pattern"));
    if (!(cfg.affected_row_fraction > 0.0 && cfg.affected_row_fraction <= 1.0)) {
      throw ConfigError("affected_row_fraction must lie in (0, 1]");
    }
    if (!cfg.image_shape) throw ConfigError("monotone pattern requires 'image_shape'");
  } else {
    throw ConfigError("unknown pattern type '" + type + "' (expected random or monotone)");
  }
  if (cfg.rates.empty()) throw ConfigError("at least one rate is required");
  for (std::size_t k = 0; k < cfg.rates.size(); ++k) {
    if (!(cfg.rates[k] > 0.0 && cfg.rates[k] < 1.0)) throw ConfigError("rates must lie in (0, 1)");
    if (k > 0 && !(cfg.rates[k] > cfg.rates[k - 1])) throw ConfigError("rates must be strictly increasing");
  }

  if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty()) {
    throw ConfigError("config needs a non-empty 'methods' list");
  }
  std::set<std::string> labels;
  for (const auto& mj : j.at("methods")) {
    auto m = parse_method_config(mj, base_dir);
    if (!labels.insert(m.label).second) throw ConfigError("duplicate method label '" + m.label + "'");
    if (m.kind == MethodKind::External && m.external_files.size() != cfg.rates.size()) {
      throw ConfigError("external method '" + m.label + "' lists " + std::to_string(m.external_files.size()) +
                        " files for " + std::to_string(cfg.rates.size()) + " rates");
    }
    cfg.methods.push_back(std::move(m));
  }

  if (j.contains("figures")) {
    const auto& f = j.at("figures");
    reject_unknown_keys(f, {"cell_px", "diff_domain"}, "figures");
    cfg.figures.cell_px = get_or<int>(f, "cell_px", cfg.figures.cell_px, "figures");
    const auto dom = get_or<std::string>(f, "diff_domain", "figure_max", "figures");
    if (dom == "figure_max") cfg.figures.diff_domain = DiffDomain::FigureMax;
    else if (dom == "fixed") cfg.figures.diff_domain = DiffDomain::Fixed;
    else throw ConfigError("figures.diff_domain must be figure_max or fixed");
    if (cfg.figures.cell_px < 1) throw ConfigError("figures.cell_px must be positive");
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(j, path.parent_path());
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["dataset"] = cfg.dataset.generic_string();
  j["has_header"] = cfg.has_header;
  if (cfg.image_shape) j["image_shape"] = std::to_string(cfg.image_shape->height) + "x" + std::to_string(cfg.image_shape->width);
  j["normalization"] = to_string(cfg.normalization);
  j["normalize_on_complete"] = cfg.normalize_on_complete;
  if (cfg.pattern == MissingPattern::RandomRate) {
    j["pattern"] = {{"type", "random"}, {"rates", cfg.rates}};
  } else {
    j["pattern"] = {{"type", "monotone"},
                    {"block_fractions", cfg.rates},
                    {"affected_row_fraction", cfg.affected_row_fraction},
                    {"corner", to_string(cfg.corner)}};
  }
  json methods = json::array();
  for (const auto& m : cfg.methods) methods.push_back(method_config_to_json(m));
  j["methods"] = methods;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir.generic_string();
  j["figures"] = {{"cell_px", cfg.figures.cell_px},
                  {"diff_domain", cfg.figures.diff_domain == DiffDomain::Fixed ? "fixed" : "figure_max"}};
  j["workers"] = cfg.workers;
  j["timeout_seconds"] = cfg.timeout_seconds;
  return j;
}

// ---------------------------------------------------------------------------
// Correlation CSVs

void write_correlation_csv(const fs::path& path, const CorrelationMatrix& m, const std::vector<std::string>& names) {
  Mask observed = !m.null_mask;
  write_csv(path, Dataset(m.values, std::move(observed), names));
}

CorrelationMatrix load_correlation_csv(const fs::path& path) {
  const auto ds = load_csv(path, true);
  if (ds.rows() != ds.cols()) {
    throw DataError("correlation CSV '" + path.string() + "' is " + std::to_string(ds.rows()) + "x" +
                    std::to_string(ds.cols()) + ", expected a square matrix");
  }
  return CorrelationMatrix(ds.values(), !ds.observed());
}

// ---------------------------------------------------------------------------
// Pipeline

ExperimentReport run_pipeline(const ExperimentConfig& config) {
  if (config.methods.empty()) throw ConfigError("config needs a non-empty 'methods' list");
  if (config.rates.empty()) throw ConfigError("at least one rate is required");

  const fs::path out_dir = resolve(config.base_dir, config.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  Dataset complete = load_csv(resolve(config.base_dir, config.dataset), config.has_header);
  if (config.image_shape) complete = complete.with_image_shape(config.image_shape);
  if (!complete.fully_observed()) throw DataError("the ground-truth dataset must not contain missing cells");

  ExperimentReport report;
  report.config = config;
  report.rows = complete.rows();
  report.cols = complete.cols();
  report.feature_names = complete.feature_names();
  report.truth = ground_truth_correlation(complete);
  write_correlation_csv(out_dir / kTruthFile, report.truth, report.feature_names);

  const Dataset mask_source =
      config.normalize_on_complete ? normalize(complete, config.normalization).first : complete;

  // Per-rate inputs: the masked data (persisted, and what external imputers
  // see) and the estimator input.
  struct RateInput {
    std::optional<Dataset> masked;
    std::optional<Dataset> input;
    std::string error;
  };
  std::vector<RateInput> inputs(config.rates.size());
  for (std::size_t k = 0; k < config.rates.size(); ++k) {
    const double rate = config.rates[k];
    MissingSpec spec;
    spec.pattern = config.pattern;
    spec.rate = rate;
    spec.block_fraction = rate;
    spec.affected_row_fraction = config.affected_row_fraction;
    spec.corner = config.corner;
    spec.seed = derive_seed(config.seed, "mask", rate);
    try {
      inputs[k].masked = apply_missing(mask_source, spec);
      write_csv(out_dir / masked_file(k, rate), *inputs[k].masked);
      report.realized_missing_rates.emplace_back(rate, missing_rate(*inputs[k].masked));
      inputs[k].input = config.normalize_on_complete ? *inputs[k].masked
                                                     : normalize(*inputs[k].masked, config.normalization).first;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      inputs[k].error = error_text(e);
      if (!inputs[k].masked) report.realized_missing_rates.emplace_back(rate, 0.0);
    }
  }

  // Method x rate jobs; each writes only its own slot.
  const std::size_t n_methods = config.methods.size();
  const std::size_t n_jobs = n_methods * config.rates.size();
  std::vector<RateResult> slots(n_jobs);
  std::atomic<std::size_t> next{0};
  const auto budget = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(config.timeout_seconds));

  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= n_jobs) return;
      const std::size_t m = job % n_methods;
      const std::size_t k = job / n_methods;
      const auto& method = config.methods[m];
      const double rate = config.rates[k];
      RateResult& rr = slots[job];
      if (!inputs[k].error.empty()) {
        rr.error = inputs[k].error;
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      try {
        DeadlineScope deadline(budget);
        const bool external = method.kind == MethodKind::External;
        auto outcome = run_method(external ? *inputs[k].masked : *inputs[k].input, method,
                                  derive_seed(config.seed, method.label, rate),
                                  external ? method.external_files[k] : fs::path{});
        const auto score = rmse_corr_detail(outcome.correlation, report.truth);
        rr.rmse = score.rmse;
        rr.valid_cells = score.valid_cells;
        rr.converged = outcome.converged;
        rr.iterations = outcome.iterations;
        rr.correlation = std::move(outcome.correlation);
      } catch (const std::exception& e) {
        rr.error = error_text(e);
      }
      rr.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };

  std::size_t n_workers = config.workers > 0 ? static_cast<std::size_t>(config.workers)
                                             : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, n_jobs);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<MethodResult> results(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    results[m].method = config.methods[m].label;
    report.method_configs[config.methods[m].label] = config.methods[m];
    for (std::size_t k = 0; k < config.rates.size(); ++k) {
      auto& rr = slots[k * n_methods + m];
      if (rr.ok()) write_correlation_csv(out_dir / correlation_file(m, config.methods[m].label, k), *rr.correlation,
                                         report.feature_names);
      results[m].per_rate.emplace(config.rates[k], std::move(rr));
    }
  }
  assign_rate_ranks(results);

  const double max_rate = config.rates.back();
  std::vector<MethodResult> ok, failed;
  for (auto& r : results) (r.ok_at(max_rate) ? ok : failed).push_back(std::move(r));
  ok = order_methods(std::move(ok), max_rate);
  std::sort(failed.begin(), failed.end(), [](const auto& a, const auto& b) { return a.method < b.method; });

  FigureInputs fig{report.truth, config.rates, ok, config.figures, config.pattern};
  auto figs = render_figures(fig, out_dir);
  report.figures = std::move(figs.files);
  report.diff_domains = std::move(figs.domains);

  report.results = std::move(ok);
  for (auto& f : failed) report.results.push_back(std::move(f));

  write_file(out_dir / kReportFile, report_to_json(report).dump(2) + "\n");
  return report;
}

json report_to_json(const ExperimentReport& report) {
  const auto& cfg = report.config;
  json j;
  j["tool"] = "corrgap";
  j["version"] = kToolVersion;
  j["seed"] = cfg.seed;
  j["config"] = config_to_json(cfg);
  j["dataset"] = {{"rows", report.rows}, {"cols", report.cols}, {"feature_names", report.feature_names}};
  j["rates"] = cfg.rates;
  j["pattern"] = cfg.pattern == MissingPattern::RandomRate ? "random" : "monotone";
  j["truth_correlation"] = kTruthFile;
  j["truth_valid_cells"] = report.truth.non_null_count();
  j["rmse_definition"] = "root-mean-square over cells non-null in both matrices; multiply by sqrt(valid_cells) "
                         "for the root-sum-square form";

  json masked = json::array();
  for (std::size_t k = 0; k < report.realized_missing_rates.size(); ++k) {
    masked.push_back({{"rate", report.realized_missing_rates[k].first},
                      {"missing_rate", report.realized_missing_rates[k].second},
                      {"path", masked_file(k, report.realized_missing_rates[k].first)}});
  }
  j["masked_data"] = masked;

  json methods = json::array();
  for (const auto& r : report.results) {
    std::size_t index = 0;
    for (; index < cfg.methods.size(); ++index)
      if (cfg.methods[index].label == r.method) break;
    json mj;
    mj["label"] = r.method;
    mj["method"] = index < cfg.methods.size() ? to_string(cfg.methods[index].kind) : "unknown";
    mj["rank_at_max_rate"] = r.rank_at_max_rate;
    mj["status"] = r.ok_at(cfg.rates.back()) ? "ok" : "failed";
    json rates = json::array();
    for (std::size_t k = 0; k < cfg.rates.size(); ++k) {
      auto it = r.per_rate.find(cfg.rates[k]);
      if (it == r.per_rate.end()) continue;
      const auto& rr = it->second;
      json e;
      e["rate"] = cfg.rates[k];
      e["wall_time_seconds"] = rr.wall_time;
      if (rr.ok()) {
        e["status"] = "ok";
        e["rmse"] = rr.rmse;
        e["valid_cells"] = rr.valid_cells;
        e["rank"] = rr.rank;
        e["sublabel"] = sublabel(rr);
        e["converged"] = rr.converged;
        e["iterations"] = rr.iterations;
        e["correlation"] = correlation_file(index, r.method, k);
      } else {
        e["status"] = "failed";
        e["error"] = rr.error;
      }
      rates.push_back(e);
    }
    mj["rates"] = rates;
    methods.push_back(mj);
  }
  j["methods"] = methods;

  json figures = json::object();
  for (const auto& [k, v] : report.figures) figures[k] = v;
  j["figures"] = figures;
  json domains = json::object();
  for (const auto& [k, v] : report.diff_domains) domains[k] = v;
  j["difference_domain"] = {{"mode", cfg.figures.diff_domain == DiffDomain::Fixed ? "fixed" : "figure_max"},
                            {"values", domains}};
  return j;
}

std::vector<fs::path> render_report(const fs::path& report_path, const fs::path& output_dir) {
  json j;
  try {
    j = json::parse(read_file(report_path));
  } catch (const json::parse_error& e) {
    throw DataError("report '" + report_path.string() + "' is not valid JSON: " + e.what());
  }
  const fs::path base = report_path.parent_path();
  try {
    FigureInputs in;
    in.truth = load_correlation_csv(base / j.at("truth_correlation").get<std::string>());
    in.rates = j.at("rates").get<std::vector<double>>();
    if (in.rates.empty()) throw DataError("report lists no rates");
    in.pattern = j.at("pattern").get<std::string>() == "monotone" ? MissingPattern::MonotoneBlock
                                                                  : MissingPattern::RandomRate;
    const auto& figs = j.at("config").at("figures");
    in.options.cell_px = figs.at("cell_px").get<int>();
    in.options.diff_domain = figs.at("diff_domain").get<std::string>() == "fixed" ? DiffDomain::Fixed
                                                                                   : DiffDomain::FigureMax;
    for (const auto& mj : j.at("methods")) {
      if (mj.at("status").get<std::string>() != "ok") continue;
      MethodResult r;
      r.method = mj.at("label").get<std::string>();
      r.rank_at_max_rate = mj.at("rank_at_max_rate").get<int>();
      for (const auto& e : mj.at("rates")) {
        RateResult rr;
        const double rate = e.at("rate").get<double>();
        if (e.at("status").get<std::string>() == "ok") {
          rr.rmse = e.at("rmse").get<double>();
          rr.rank = e.at("rank").get<int>();
          rr.valid_cells = e.at("valid_cells").get<std::size_t>();
          rr.correlation = load_correlation_csv(base / e.at("correlation").get<std::string>());
        } else {
          rr.error = e.value("error", std::string("failed"));
        }
        r.per_rate.emplace(rate, std::move(rr));
      }
      in.ordered.push_back(std::move(r));
    }
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw DataError("cannot create output directory '" + output_dir.string() + "': " + ec.message());
    const auto out = render_figures(in, output_dir);
    std::vector<fs::path> paths;
    for (const auto& [k, v] : out.files) paths.push_back(output_dir / v);
    return paths;
  } catch (const json::exception& e) {
    throw DataError("report '" + report_path.string() + "' is missing fields: " + e.what());
  }
}

}  // namespace corrgap
