// Copyright 2026 The vriwae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef VRIWAE_HARNESS_SWEEP_HPP
#define VRIWAE_HARNESS_SWEEP_HPP

#include <vriwae/analytics.hpp>
#include <vriwae/estimators.hpp>
#include <vriwae/harness/config.hpp>
#include <vriwae/models.hpp>
#include <vriwae/statcore.hpp>

#include <boost/random/uniform_int_distribution.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace vriwae::harness {

/// One CSV row. Empirical rows fill the moment columns; analytic rows leave them empty.
struct SnrRecordRow {
  std::string source = "empirical";
  std::string model;
  std::string mode;
  std::string psi;
  std::size_t d = 0;
  double eps = 0.0;
  double alpha = 0.0;
  std::size_t N = 0;
  std::size_t M = 0;
  std::size_t R = 0;
  std::optional<double> mean, variance, snr, snr_stderr;
  std::optional<double> analytic_value;
  std::string formula_id;
  std::uint64_t seed = 0;
  std::string kind;  // analytic rows only, written to the side file
};

inline constexpr const char* kCsvColumns =
    "source,model,mode,psi,d,eps,alpha,N,M,R,mean,variance,snr,snr_stderr,analytic_value,formula_id,seed";

/// Resolved coordinate (and datapoint for lingauss) for one dimension.
struct Coordinate {
  std::size_t d = 0;
  std::size_t k = 0;
  std::string psi;
  std::optional<std::size_t> point;
};

struct SweepResult {
  SweepConfig config;
  std::vector<Coordinate> coordinates;
  std::vector<SnrRecordRow> rows;
  std::vector<SnrRecordRow> analytic_rows;
  nlohmann::json summary;
  std::string timestamp;
};

struct RunOptions {
  unsigned workers = 0;   // 0 = default_workers()
  std::string timestamp;  // empty = current UTC time
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline std::size_t draw_index(std::uint64_t seed, std::uint64_t stream, std::size_t n) {
  Rng rng = child_stream(seed, stream);
  boost::random::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

inline constexpr std::uint64_t kCoordStream = 0x636f6f7264000000ULL;
inline constexpr std::uint64_t kPointStream = 0x706f696e74000000ULL;

/// Formula id of the reference paired with an empirical row.
inline std::string primary_formula(ModelKind model, const std::string& family, GradMode mode, double alpha,
                                   Target target) {
  const bool a0 = alpha == 0.0;
  const bool rep = mode == GradMode::rep;
  if (model == ModelKind::gaussian) {
    if (family != "phi") return {};
    if (target == Target::mean) return rep ? "gauss_rep_mean_expansion" : "gauss_drep_mean_large_n";
    if (rep) return a0 ? "gauss_rep_snr_alpha0" : "gauss_rep_snr_leading";
    return a0 ? "gauss_drep_snr_alpha0" : "";
  }
  if (family == "theta") return target == Target::mean ? "lingauss_rep_mean_expansion_theta" : "lingauss_rep_snr_theta";
  if (family != "b") return {};
  if (target == Target::mean) return "lingauss_rep_mean_expansion_b";
  if (rep) return a0 ? "lingauss_rep_snr_b_alpha0" : "lingauss_rep_snr_b_leading";
  return a0 ? "lingauss_drep_snr_b_alpha0" : "lingauss_drep_snr_b_4_over_alpha";
}

inline std::string csv_cell(const std::optional<double>& v) { return v ? format_g17(*v) : std::string(); }

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct GridPoint {
  GradMode mode;
  std::size_t d_index;
  double eps;
  double alpha;
  std::size_t N;
};

}  // namespace detail

inline void write_csv_row(std::ostream& os, const SnrRecordRow& r) {
  using detail::csv_cell;
  os << r.source << ',' << r.model << ',' << r.mode << ',' << r.psi << ',' << r.d << ',' << format_g17(r.eps) << ','
     << format_g17(r.alpha) << ',' << r.N << ',' << r.M << ',' << r.R << ',' << csv_cell(r.mean) << ','
     << csv_cell(r.variance) << ',' << csv_cell(r.snr) << ',' << csv_cell(r.snr_stderr) << ','
     << csv_cell(r.analytic_value) << ',' << r.formula_id << ',' << r.seed;
}

/// Main CSV: a timestamp comment line, the header, one row per grid point in canonical order.
inline void write_sweep_csv(std::ostream& os, const SweepResult& res) {
  os << "# vriwae sweep " << res.config.name << " generated " << res.timestamp << '\n';
  os << kCsvColumns << '\n';
  for (const auto& r : res.rows) {
    write_csv_row(os, r);
    os << '\n';
  }
}

/// Side file listing every closed-form prediction of every grid point (extra column: kind).
inline void write_analytic_csv(std::ostream& os, const SweepResult& res) {
  os << "# vriwae analytic " << res.config.name << " generated " << res.timestamp << '\n';
  os << kCsvColumns << ",kind\n";
  for (const auto& r : res.analytic_rows) {
    write_csv_row(os, r);
    os << ',' << r.kind << '\n';
  }
}

/// Drops the leading timestamp comment so two runs can be compared byte for byte.
inline std::string strip_timestamp(const std::string& csv) {
  if (csv.rfind("# ", 0) != 0) return csv;
  const auto nl = csv.find('\n');
  return nl == std::string::npos ? std::string() : csv.substr(nl + 1);
}

inline SweepResult run_sweep(const SweepConfig& cfg, const RunOptions& opts = {}) {
  cfg.validate();
  SweepResult res;
  res.config = cfg;
  res.timestamp = opts.timestamp.empty() ? utc_timestamp() : opts.timestamp;
  const unsigned workers = opts.workers ? opts.workers : default_workers();

  // Coordinates and datasets per dimension.
  std::vector<std::optional<LinGaussDataset>> datasets(cfg.d.size());
  for (std::size_t i = 0; i < cfg.d.size(); ++i) {
    const std::size_t d = cfg.d[i];
    Coordinate c;
    c.d = d;
    c.k = cfg.k ? *cfg.k : detail::draw_index(cfg.seed, detail::kCoordStream + d, d);
    c.psi = cfg.psi + "_" + std::to_string(c.k + 1);
    if (cfg.model == ModelKind::lingauss) {
      if (!cfg.dataset.empty()) {
        datasets[i] = load_dataset(cfg.dataset);
        if (datasets[i]->d != d) throw ConfigError("dataset", "file dimension does not match d");
      } else {
        datasets[i] = generate_dataset(cfg.effective_dataset_seed(), d, cfg.T);
      }
      c.point = cfg.point ? *cfg.point : detail::draw_index(cfg.seed, detail::kPointStream + d, datasets[i]->T);
      if (*c.point >= datasets[i]->T) throw ConfigError("point", "must be < T");
    }
    res.coordinates.push_back(c);
  }

  std::vector<detail::GridPoint> grid;
  grid.reserve(cfg.grid_size());
  for (auto mode : cfg.modes)
    for (std::size_t di = 0; di < cfg.d.size(); ++di)
      for (double eps : cfg.eps)
        for (double alpha : cfg.alpha)
          for (auto n : cfg.N) grid.push_back({mode, di, eps, alpha, n});

  std::vector<SnrRecordRow> rows(grid.size());
  std::vector<std::vector<SnrRecordRow>> analytic(grid.size());

  auto run_point = [&](std::size_t g, unsigned inner_workers) {
    const auto& p = grid[g];
    const auto& coord = res.coordinates[p.d_index];
    const std::size_t d = coord.d;
    EstimatorConfig ec;
    ec.N = p.N;
    ec.M = cfg.M;
    ec.alpha = p.alpha;
    ec.mode = p.mode;
    ec.seed = cfg.seed;
    SnrValue s;
    std::optional<PredictionSet> preds;
    const SweepOptions so{inner_workers};
    if (cfg.model == ModelKind::gaussian) {
      const auto model = GaussianModel::offset(d, p.eps);
      ec.psi = cfg.psi == "phi" ? model.phi_index(coord.k) : model.theta_index(coord.k);
      s = replicate_sweep(model, ec, cfg.replicates, so);
      if (cfg.psi == "phi") preds = gaussian_predictions(d, p.eps, p.alpha, p.N, cfg.M, coord.k);
    } else {
      const auto model = lingauss_offset(*datasets[p.d_index], *coord.point, p.eps);
      ec.psi = cfg.psi == "theta" ? model.theta_index(coord.k)
                                  : (cfg.psi == "a" ? model.a_index(coord.k) : model.b_index(coord.k));
      s = replicate_sweep(model, ec, cfg.replicates, so);
      if (cfg.psi != "a")
        preds = lingauss_predictions(d, p.eps, p.alpha, p.N, cfg.M, coord.k, model.x()[coord.k],
                                     model.theta()[coord.k]);
    }
    SnrRecordRow row;
    row.model = to_string(cfg.model);
    row.mode = to_string(p.mode);
    row.psi = coord.psi;
    row.d = d;
    row.eps = p.eps;
    row.alpha = p.alpha;
    row.N = p.N;
    row.M = cfg.M;
    row.R = cfg.replicates;
    row.mean = s.mean;
    row.variance = s.variance;
    row.snr = s.snr;
    row.snr_stderr = s.snr_stderr;
    row.seed = cfg.seed;
    if (cfg.emit_analytic && preds) {
      const auto id = detail::primary_formula(cfg.model, cfg.psi, p.mode, p.alpha, cfg.target);
      if (!id.empty()) {
        for (const auto& item : preds->items()) {
          if (item.formula_id == id) {
            row.analytic_value = item.value;
            row.formula_id = id;
            break;
          }
        }
      }
      for (const auto& item : preds->items()) {
        if (psi_family(item.config.psi) != cfg.psi) continue;
        SnrRecordRow a;
        a.source = "analytic";
        a.model = row.model;
        a.mode = row.mode;
        a.psi = item.config.psi;
        a.d = d;
        a.eps = p.eps;
        a.alpha = p.alpha;
        a.N = p.N;
        a.M = cfg.M;
        a.R = cfg.replicates;
        a.analytic_value = item.value;
        a.formula_id = item.formula_id;
        a.seed = cfg.seed;
        a.kind = to_string(item.kind);
        analytic[g].push_back(std::move(a));
      }
    }
    rows[g] = std::move(row);
  };

  if (workers > 1 && grid.size() >= workers) {
    parallel_blocks(grid.size(), workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t g = begin; g < end; ++g) run_point(g, 1);
    });
  } else {
    for (std::size_t g = 0; g < grid.size(); ++g) run_point(g, workers);
  }
  res.rows = std::move(rows);
  for (auto& block : analytic)
    for (auto& a : block) res.analytic_rows.push_back(std::move(a));

  // Summary: deviation from the paired reference at the largest N, and log-log SNR slopes.
  nlohmann::json summary;
  summary["name"] = cfg.name;
  summary["generated"] = res.timestamp;
  summary["config"] = to_json(cfg);
  summary["rows"] = res.rows.size();
  auto coords = nlohmann::json::array();
  for (const auto& c : res.coordinates) {
    nlohmann::json jc{{"d", c.d}, {"psi", c.psi}};
    if (c.point) jc["point"] = *c.point;
    coords.push_back(jc);
  }
  summary["coordinates"] = coords;

  std::size_t n_max = 0;
  for (auto n : cfg.N) n_max = std::max(n_max, n);
  std::map<std::tuple<std::size_t, double, double>, nlohmann::json> groups;
  std::map<std::tuple<std::string, std::size_t, double, double>, std::pair<std::vector<double>, std::vector<double>>>
      series;
  for (const auto& r : res.rows) {
    const double emp = cfg.target == Target::snr ? *r.snr : *r.mean;
    if (std::isfinite(*r.snr) && *r.snr > 0.0 && r.N > 0) {
      auto& s = series[{r.mode, r.d, r.eps, r.alpha}];
      s.first.push_back(std::log(static_cast<double>(r.N)));
      s.second.push_back(std::log(*r.snr));
    }
    if (r.N != n_max) continue;
    auto& grp = groups[{r.d, r.eps, r.alpha}];
    if (grp.is_null()) {
      grp = {{"d", r.d}, {"eps", r.eps}, {"alpha", r.alpha}, {"N", r.N}, {"max_rel_dev", nullptr},
             {"entries", nlohmann::json::array()}};
    }
    nlohmann::json e{{"mode", r.mode}, {"empirical", std::isfinite(emp) ? nlohmann::json(emp) : nlohmann::json(nullptr)}};
    if (r.analytic_value && *r.analytic_value != 0.0 && std::isfinite(emp)) {
      const double dev = std::abs(emp / *r.analytic_value - 1.0);
      e["analytic"] = *r.analytic_value;
      e["formula_id"] = r.formula_id;
      e["rel_dev"] = dev;
      if (grp["max_rel_dev"].is_null() || dev > grp["max_rel_dev"].get<double>()) grp["max_rel_dev"] = dev;
    }
    grp["entries"].push_back(e);
  }
  auto dev = nlohmann::json::array();
  for (auto& [key, grp] : groups) dev.push_back(grp);
  summary["max_relative_deviation"] = dev;
  auto slopes = nlohmann::json::array();
  for (const auto& [key, s] : series) {
    if (s.first.size() < 2) continue;
    const auto& [mode, d, eps, alpha] = key;
    slopes.push_back({{"mode", mode}, {"d", d}, {"eps", eps}, {"alpha", alpha},
                      {"snr_loglog_slope", detail::least_squares_slope(s.first, s.second)}});
  }
  summary["snr_slopes"] = slopes;
  res.summary = std::move(summary);
  return res;
}

struct OutputPaths {
  std::filesystem::path csv, analytic_csv, summary_json;
};

/// Writes <name>.csv, <name>_analytic.csv (when emit_analytic) and <name>_summary.json under `dir`.
inline OutputPaths write_sweep_outputs(const SweepResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  OutputPaths out;
  auto open = [](const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    return os;
  };
  out.csv = dir / (res.config.name + ".csv");
  {
    auto os = open(out.csv);
    write_sweep_csv(os, res);
  }
  if (res.config.emit_analytic) {
    out.analytic_csv = dir / (res.config.name + "_analytic.csv");
    auto os = open(out.analytic_csv);
    write_analytic_csv(os, res);
  }
  out.summary_json = dir / (res.config.name + "_summary.json");
  {
    auto os = open(out.summary_json);
    os << res.summary.dump(2) << '\n';
  }
  return out;
}

}  // namespace vriwae::harness

#endif  // VRIWAE_HARNESS_SWEEP_HPP
