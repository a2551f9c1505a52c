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


#ifndef VRIWAE_HARNESS_CLI_HPP
#define VRIWAE_HARNESS_CLI_HPP

#include <vriwae/collapse.hpp>
#include <vriwae/harness/config.hpp>
#include <vriwae/harness/oracles.hpp>
#include <vriwae/harness/presets.hpp>
#include <vriwae/harness/sweep.hpp>
#include <vriwae/models/dataset.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>

/**
 * \file
 * \brief Command line front end.
 *
 *     vriwae_cli sweep --config sweep.json [--out DIR]
 *     vriwae_cli preset fig1 [--scale desk|full] [--seed S] [--out DIR]
 *     vriwae_cli oracles [--json report.json]
 *     vriwae_cli collapse --N 4096 --beta 100 --delta 2 --lambda 0.5 --replicates 2000
 *     vriwae_cli dataset gen --seed 1 --d 10 --out data.csv
 *     vriwae_cli dataset dump --in data.csv
 *
 * Exit codes: 0 success, 1 check failure, 2 configuration or usage error.
 * VRIWAE_THREADS sets the worker count unless --workers is given.
 */

namespace vriwae::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;

namespace detail {

inline void report_outputs(std::ostream& out, const OutputPaths& p) {
  out << "wrote " << p.csv.string() << '\n';
  if (!p.analytic_csv.empty()) out << "wrote " << p.analytic_csv.string() << '\n';
  out << "wrote " << p.summary_json.string() << '\n';
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"VR-IWAE bound and gradient estimator experiments", "vriwae_cli"};
  app.require_subcommand(1);
  unsigned workers = 0;
  app.add_option("--workers", workers, "worker threads (0: VRIWAE_THREADS or hardware)");

  auto* sweep = app.add_subcommand("sweep", "run a sweep from a JSON config");
  std::string config_path, sweep_out;
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--out", sweep_out, "output directory (overrides the config)");

  auto* preset = app.add_subcommand("preset", "run a figure preset");
  std::string preset_name, scale_name = "desk", preset_out;
  std::optional<std::uint64_t> preset_seed;
  std::optional<std::size_t> preset_r, preset_max_n;
  preset->add_option("name", preset_name, "fig1..fig5, figApp1..figApp3")->required();
  preset->add_option("--scale", scale_name, "desk or full");
  preset->add_option("--seed", preset_seed, "seed");
  preset->add_option("--out", preset_out, "output directory");
  preset->add_option("--replicates", preset_r, "replicate override");
  preset->add_option("--max-n", preset_max_n, "drop N above this value");

  auto* oracles = app.add_subcommand("oracles", "run the oracle suite");
  std::string json_path;
  std::uint64_t oracle_seed = 0;
  oracles->add_option("--json", json_path, "write the JSON report here");
  oracles->add_option("--seed", oracle_seed, "seed");

  auto* collapse = app.add_subcommand("collapse", "softmax weight collapse statistics (CSV)");
  std::size_t cn = 0, creps = 2000;
  double beta = 1.0, delta = 1.0, lambda = 0.5;
  std::uint64_t cseed = 0;
  std::string cout_path;
  collapse->add_option("--N", cn, "number of weights")->required();
  collapse->add_option("--beta", beta, "inverse temperature");
  collapse->add_option("--delta", delta, "weight power");
  collapse->add_option("--lambda", lambda, "mixing coefficient");
  collapse->add_option("--replicates", creps, "replicates");
  collapse->add_option("--seed", cseed, "seed");
  collapse->add_option("--out", cout_path, "CSV file (default: stdout)");

  auto* dataset = app.add_subcommand("dataset", "linear Gaussian dataset");
  dataset->require_subcommand(1);
  std::uint64_t ds_seed = 0;
  std::size_t ds_d = 10, ds_T = 1024;
  std::string ds_out, ds_in;
  auto* gen = dataset->add_subcommand("gen", "generate and write a dataset");
  gen->add_option("--seed", ds_seed, "seed");
  gen->add_option("--d", ds_d, "dimension");
  gen->add_option("--T", ds_T, "number of points");
  gen->add_option("--out", ds_out, "output CSV")->required();
  auto* dump = dataset->add_subcommand("dump", "print a dataset (from --in or regenerated from --seed/--d)");
  dump->add_option("--seed", ds_seed, "seed");
  dump->add_option("--d", ds_d, "dimension");
  dump->add_option("--T", ds_T, "number of points");
  dump->add_option("--in", ds_in, "dataset CSV to read");
  dump->add_option("--out", ds_out, "output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    const RunOptions run_opts{workers, {}};
    if (*sweep) {
      auto cfg = load_sweep_config(config_path);
      if (!sweep_out.empty()) cfg.output = sweep_out;
      const auto res = run_sweep(cfg, run_opts);
      detail::report_outputs(out, write_sweep_outputs(res, cfg.output));
      return kExitOk;
    }
    if (*preset) {
      PresetOverrides ov;
      ov.seed = preset_seed;
      ov.replicates = preset_r;
      ov.max_n = preset_max_n;
      if (!preset_out.empty()) ov.output = preset_out;
      const auto cfg = preset_config(preset_name, parse_scale(scale_name), ov);
      const auto res = run_sweep(cfg, run_opts);
      detail::report_outputs(out, write_sweep_outputs(res, cfg.output));
      return kExitOk;
    }
    if (*oracles) {
      OracleOptions oo;
      oo.seed = oracle_seed;
      oo.workers = workers;
      const auto rep = run_oracle_suite(oo);
      for (const auto& c : rep.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " observed=" << format_g17(c.observed)
            << " expected=" << format_g17(c.expected) << " tol=" << format_g17(c.tolerance) << '\n';
      }
      if (!json_path.empty()) {
        std::ofstream os(json_path);
        if (!os) throw std::runtime_error("cannot open '" + json_path + "' for writing");
        os << rep.to_json().dump(2) << '\n';
      }
      out << (rep.passed() ? "all oracle checks passed" : "oracle checks FAILED") << '\n';
      return rep.passed() ? kExitOk : kExitCheckFailure;
    }
    if (*collapse) {
      const auto s = simulate_collapse(cn, beta, delta, lambda, creps, {cseed, workers});
      if (cout_path.empty()) {
        write_collapse_csv_header(out);
        write_collapse_csv_rows(out, s);
      } else {
        std::ofstream os(cout_path);
        if (!os) throw std::runtime_error("cannot open '" + cout_path + "' for writing");
        write_collapse_csv_header(os);
        write_collapse_csv_rows(os, s);
        out << "wrote " << cout_path << '\n';
      }
      return kExitOk;
    }
    if (*gen) {
      save_dataset(ds_out, generate_dataset(ds_seed, ds_d, ds_T));
      out << "wrote " << ds_out << '\n';
      return kExitOk;
    }
    if (*dump) {
      if (!ds_in.empty() && !std::filesystem::exists(ds_in)) throw ConfigError("in", "no such file '" + ds_in + "'");
      const auto ds = ds_in.empty() ? generate_dataset(ds_seed, ds_d, ds_T) : load_dataset(ds_in);
      if (ds_out.empty()) {
        write_dataset_csv(out, ds);
      } else {
        save_dataset(ds_out, ds);
        out << "wrote " << ds_out << '\n';
      }
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {  // includes ConfigError
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
  return kExitConfigError;
}

}  // namespace vriwae::harness

#endif  // VRIWAE_HARNESS_CLI_HPP
