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


#ifndef VRIWAE_HARNESS_ORACLES_HPP
#define VRIWAE_HARNESS_ORACLES_HPP

#include <vriwae/collapse.hpp>
#include <vriwae/estimators.hpp>
#include <vriwae/models.hpp>
#include <vriwae/statcore.hpp>

#include <json.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace vriwae::harness {

struct OracleCheck {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct OracleReport {
  std::vector<OracleCheck> checks;

  [[nodiscard]] bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
  }

  [[nodiscard]] nlohmann::json to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& c : checks) {
      arr.push_back({{"name", c.name}, {"observed", c.observed}, {"expected", c.expected},
                     {"tolerance", c.tolerance}, {"passed", c.passed}, {"detail", c.detail}});
    }
    return {{"passed", passed()}, {"checks", arr}};
  }
};

/// The normal functions are injectable so that a corrupted cdf can be fed in as a negative control.
struct OracleOptions {
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::function<double(double)> cdf = [](double u) { return normal_cdf(u); };
  std::function<double(double)> mills = [](double u) { return mills_ratio(u); };
  /// Monte Carlo checks accept deviations up to this many standard errors.
  double z = 4.0;
};

namespace detail {

inline OracleCheck abs_check(std::string name, double observed, double expected, double tol, std::string detail = {}) {
  OracleCheck c{std::move(name), observed, expected, tol, false, std::move(detail)};
  c.passed = std::isfinite(observed) && std::abs(observed - expected) <= tol;
  return c;
}

inline std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, i / (n - 1.0));
  return out;
}

}  // namespace detail

/// Mills, cdf, zeta, negative-moment, max-moment, finite-difference and unbiasedness oracles.
inline OracleReport run_oracle_suite(const OracleOptions& opts = {}) {
  using detail::abs_check;
  OracleReport rep;
  const unsigned workers = opts.workers ? opts.workers : default_workers();
  const std::uint64_t seed = opts.seed;

  {
    int violations = 0;
    for (double u : detail::log_spaced(1e-3, 50.0, 200)) {
      const double m = opts.mills(u);
      if (!(u / (u * u + 1.0) < m && m < 1.0 / u)) ++violations;
    }
    rep.checks.push_back(abs_check("mills_bounds", violations, 0.0, 0.0, "u/(u^2+1) < m(u) < 1/u on 200 points in [1e-3, 50]"));
  }
  {
    double worst = 0.0;
    for (double u : detail::log_spaced(1e-2, 8.0, 100)) {
      const double from_cdf = opts.cdf(-u) / normal_pdf(u);
      worst = std::max(worst, std::abs(from_cdf / opts.mills(u) - 1.0));
    }
    rep.checks.push_back(abs_check("mills_cdf_consistency", worst, 0.0, 1e-9, "max |Phi(-u)/(phi(u) m(u)) - 1| on [1e-2, 8]"));
  }
  {
    const std::vector<std::pair<double, double>> table{
        {-8.0, 6.2209605742717841235e-16}, {-3.0, 0.0013498980316300945267}, {-0.5, 0.30853753872598689636},
        {0.7, 0.75803634777692697138},    {2.0, 0.9772498680518207928},    {5.0, 0.99999971334842812081}};
    double worst = 0.0;
    for (auto [u, p] : table) worst = std::max(worst, std::abs(opts.cdf(u) - p));
    rep.checks.push_back(abs_check("normal_cdf_table", worst, 0.0, 1e-12, "max abs error against reference values"));
  }
  {
    std::uint64_t stream = 0;
    for (auto [s, sigma] : {std::pair{0.0, 1.0}, std::pair{1.0, 3.0}, std::pair{1.5, 4.0}}) {
      const auto cf = zeta_lognormal(s, sigma);
      const auto mc = zeta_mc(s, sigma, 1000000, mix_seed(seed, 0x7a657461ULL + stream++), workers);
      char name[64];
      std::snprintf(name, sizeof name, "zeta_mc_s%g_sigma%g", s, sigma);
      rep.checks.push_back(abs_check(name, mc.zeta, cf.zeta, opts.z * mc.zeta_stderr, "closed form vs rejection MC"));
    }
    int violations = 0;
    for (double s = 0.5; s <= 4.0; s += 0.5)
      for (double sigma = 2.0 * s; sigma <= 40.0; sigma *= 2.0) {
        const auto z = zeta_lognormal(s, sigma);
        if (!z.bound || z.zeta > *z.bound) ++violations;
      }
    rep.checks.push_back(abs_check("zeta_bound", violations, 0.0, 0.0, "zeta(s) <= 6/Phi(1) s/sigma when sigma >= 2s >= 1"));
  }
  {
    auto L = [](double t) { return 1.0 / (1.0 + t); };
    double worst = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    for (int n : {2, 5, 20, 50}) {
      const double v = neg_moment_oracle(L, 1.0, n);
      worst = std::max(worst, std::abs(v - n / (n - 1.0)));
      decreasing = decreasing && v < prev;
      prev = v;
    }
    rep.checks.push_back(abs_check("neg_moment_exp1", worst, 0.0, 1e-6, "E[1/Wbar] = N/(N-1), N in {2, 5, 20, 50}"));
    rep.checks.push_back(abs_check("neg_moment_decreasing", decreasing ? 0.0 : 1.0, 0.0, 0.0, "strictly decreasing in N"));
    const int n = 5;
    const std::size_t draws = 200000;
    std::vector<double> vals(draws);
    parallel_blocks(draws, workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r) {
        Rng rng = child_stream(mix_seed(seed, 0x6e6567ULL), r);
        double sum = 0.0;
        for (int j = 0; j < n; ++j) sum -= std::log(uniform_open01(rng));
        vals[r] = n / sum;
      }
    });
    const auto acc = accumulate(vals);
    rep.checks.push_back(abs_check("neg_moment_mc_n5", acc.mean, neg_moment_oracle(L, 1.0, n), opts.z * acc.stderr_mean(),
                                   "quadrature vs 2e5 draws"));
  }
  {
    const auto m2 = max_gaussian_moment(2, 1.0, 200000, mix_seed(seed, 0x6d6178ULL), workers);
    rep.checks.push_back(abs_check("max_moment_n2", m2.signed_mean, 1.0 / std::sqrt(std::numbers::pi),
                                   opts.z * m2.signed_stderr, "E max(Z1, Z2) = 1/sqrt(pi)"));
    const auto m3 = max_gaussian_moment(3, 1.0, 200000, mix_seed(seed, 0x6d6179ULL), workers);
    rep.checks.push_back(abs_check("max_moment_n3", m3.signed_mean, 1.5 / std::sqrt(std::numbers::pi),
                                   opts.z * m3.signed_stderr, "E max(Z1, Z2, Z3) = 3/(2 sqrt(pi))"));
  }
  {
    Rng rng = child_stream(seed, 0x6664ULL);
    NormalSampler normal;
    const GaussianModel g({0.3, -0.5, 1.2}, {-0.1, 0.4, 0.9}, 0.7);
    const LinearGaussianModel lg({0.2, -1.3, 0.8}, {0.45, 0.6, -0.2}, {0.1, 0.3, -0.4}, {1.5, -0.6, 2.2});
    double worst_g = 0.0, worst_l = 0.0;
    std::vector<double> e(3);
    auto rel = [](double a, double f) { return std::abs(a - f) / (1e-5 * std::abs(f) + 1e-8); };
    for (int i = 0; i < 50; ++i) {
      normal.fill(e, rng);
      for (std::size_t psi = 0; psi < 6; ++psi) {
        worst_g = std::max(worst_g, rel(g.d_log_weight(e, psi, GradMode::rep), fd_log_weight_partial(g, e, psi, GradMode::rep)));
        if (psi >= 3)
          worst_g = std::max(worst_g, rel(g.d_log_weight(e, psi, GradMode::drep), fd_log_weight_partial(g, e, psi, GradMode::drep)));
      }
      for (std::size_t psi = 0; psi < 9; ++psi) {
        worst_l = std::max(worst_l, rel(lg.d_log_weight(e, psi, GradMode::rep), fd_log_weight_partial(lg, e, psi, GradMode::rep)));
        if (psi >= 3)
          worst_l = std::max(worst_l, rel(lg.d_log_weight(e, psi, GradMode::drep), fd_log_weight_partial(lg, e, psi, GradMode::drep)));
      }
    }
    // Observed values are errors in units of the tolerance 1e-5 |fd| + 1e-8.
    rep.checks.push_back(abs_check("fd_gradient_gaussian", worst_g, 0.0, 1.0, "analytic vs central FD, 50 draws"));
    rep.checks.push_back(abs_check("fd_gradient_lingauss", worst_l, 0.0, 1.0, "analytic vs central FD, 50 draws"));
  }
  {
    const auto g = GaussianModel::offset(2, 0.2);
    const double alpha = 0.3, h = 1e-3;
    const std::size_t n = 5, R = 200000;
    EstimatorConfig cfg;
    cfg.N = n;
    cfg.alpha = alpha;
    cfg.psi = g.phi_index(0);
    cfg.seed = mix_seed(seed, 0x726570ULL);
    const auto repv = accumulate(replicate_values(g, cfg, R, SweepOptions{workers}));
    std::vector<double> params(g.params().begin(), g.params().end());
    params[cfg.psi] += h;
    const auto plus = g.with_params(params);
    params[cfg.psi] -= 2.0 * h;
    const auto minus = g.with_params(params);
    std::vector<double> fd(R);
    const std::uint64_t fd_seed = mix_seed(seed, 0x666464ULL);
    parallel_blocks(R, workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r) {
        Rng rng = child_stream(fd_seed, r);
        const auto block = draw_noise_block(2, n, rng);
        fd[r] = (vriwae_bound_on_noise(plus, block, alpha) - vriwae_bound_on_noise(minus, block, alpha)) / (2.0 * h);
      }
    });
    const auto fdv = accumulate(fd);
    rep.checks.push_back(abs_check("unbiasedness_rep", repv.mean, fdv.mean,
                                   opts.z * std::hypot(repv.stderr_mean(), fdv.stderr_mean()),
                                   "REP mean vs CRN finite difference of the bound, 2e5 draws each"));
  }
  return rep;
}

}  // namespace vriwae::harness

#endif  // VRIWAE_HARNESS_ORACLES_HPP
