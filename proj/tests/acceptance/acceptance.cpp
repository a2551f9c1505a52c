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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <vriwae/analytics.hpp>
#include <vriwae/collapse.hpp>
#include <vriwae/estimators.hpp>
#include <vriwae/harness.hpp>
#include <vriwae/models.hpp>
#include <vriwae/statcore.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace vriwae;
using namespace vriwae::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = o.pass;
  if (budget_s > 0 && secs > budget_s) {
    pass = false;
    o.detail += " [over the " + std::to_string(static_cast<int>(budget_s)) + " s budget]";
  }
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

EstimatorConfig est(std::size_t n, double alpha, std::size_t psi, GradMode mode, std::uint64_t seed) {
  EstimatorConfig c;
  c.N = n;
  c.alpha = alpha;
  c.psi = psi;
  c.mode = mode;
  c.seed = seed;
  return c;
}

}  // namespace

int main() {
  run(1, "Gaussian REP SNR, d=10 eps=0.2 alpha=0.9 N=2^12 R=2000", 60, [] {
    const auto g = GaussianModel::offset(10, 0.2);
    const auto s = replicate_sweep(g, est(4096, 0.9, g.phi_index(0), GradMode::rep, 101), 2000);
    const double ref = gaussian_predictions(10, 0.2, 0.9, 4096, 1, 0)
                           .at(PredictionKind::snr_rep_leading, "phi", "gauss_rep_snr_leading").value;
    const double dev = std::abs(s.snr / ref - 1.0);
    return Outcome{dev <= 0.15, fmt("snr=%.4f", s.snr) + fmt(" prediction=%.4f", ref) + fmt(" rel_dev=%.4f", dev)};
  });

  run(2, "high-d collapse, d=500 eps=2 alpha=0.5 N=2^1..2^10 R=500", 120, [] {
    const auto g = GaussianModel::offset(500, 2.0);
    double worst = 0.0;
    std::ostringstream os;
    for (std::size_t n = 2; n <= 1024; n *= 2) {
      const auto s = replicate_sweep(g, est(n, 0.5, g.phi_index(0), GradMode::rep, 202), 500);
      worst = std::max(worst, std::abs(s.snr / 2.0 - 1.0));
      os << fmt(" %.3f", s.snr);
    }
    return Outcome{worst <= 0.20, "snr by N:" + os.str() + fmt("; worst rel_dev=%.4f", worst)};
  });

  run(3, "DREP vanishes at the optimum", 0, [] {
    const auto g = GaussianModel::offset(5, 0.0);
    const std::vector<std::pair<std::size_t, double>> grid{{1, 0.0}, {4, 0.3}, {16, 0.5}, {64, 0.9}, {256, 0.0}, {1024, 0.7}};
    double worst = 0.0;
    for (auto [n, alpha] : grid)
      for (double v : replicate_values(g, est(n, alpha, g.phi_index(2), GradMode::drep, 303), 200))
        worst = std::max(worst, std::abs(v));
    return Outcome{worst <= 1e-12, fmt("max |draw| = %.3g over 6 (N, alpha) points x 200 draws", worst)};
  });

  run(4, "REP unbiasedness, d=2 eps=0.2 alpha=0.3 N=5, 1e6 draws", 90, [] {
    const auto g = GaussianModel::offset(2, 0.2);
    const double alpha = 0.3, h = 1e-3;
    const std::size_t n = 5, R = 1000000;
    const std::size_t psi = g.phi_index(0);
    const auto rep = accumulate(replicate_values(g, est(n, alpha, psi, GradMode::rep, 404), R));
    std::vector<double> params(g.params().begin(), g.params().end());
    params[psi] += h;
    const auto plus = g.with_params(params);
    params[psi] -= 2.0 * h;
    const auto minus = g.with_params(params);
    std::vector<double> fd(R);
    parallel_blocks(R, default_workers(), [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r) {
        Rng rng = child_stream(405, r);
        const auto block = draw_noise_block(2, n, rng);
        fd[r] = (vriwae_bound_on_noise(plus, block, alpha) - vriwae_bound_on_noise(minus, block, alpha)) / (2.0 * h);
      }
    });
    const auto fda = accumulate(fd);
    const double se = std::hypot(rep.stderr_mean(), fda.stderr_mean());
    const double gap = std::abs(rep.mean - fda.mean);
    return Outcome{gap <= 3.0 * se, fmt("REP mean=%.6f", rep.mean) + fmt(" FD mean=%.6f", fda.mean) +
                                        fmt(" |gap|/se=%.3f", gap / se)};
  });

  run(5, "DREP/REP SNR ratio, lingauss d=10 eps=0.2 alpha=0.5 N=2^12 R=2000", 120, [] {
    PresetOverrides ov;
    ov.d = std::vector<std::size_t>{10};
    ov.eps = std::vector<double>{0.2};
    ov.alpha = std::vector<double>{0.5};
    ov.replicates = 2000;
    auto cfg = preset_config("fig4", Scale::desk, ov);
    cfg.N = {4096};
    cfg.modes = {GradMode::rep, GradMode::drep};
    const auto res = run_sweep(cfg);
    const double ratio = *res.rows[1].snr / *res.rows[0].snr;
    return Outcome{std::abs(ratio / 8.0 - 1.0) <= 0.20,
                   fmt("SNR_REP=%.4f", *res.rows[0].snr) + fmt(" SNR_DREP=%.4f", *res.rows[1].snr) +
                       fmt(" ratio=%.4f (target 8)", ratio) + " at " + res.rows[0].psi};
  });

  run(6, "mean expansion, d=1 eps=0.2, 1e6 replicates", 60, [] {
    const GaussianModel g({0.2}, {0.0});
    bool ok = true;
    std::ostringstream os;
    std::uint64_t seed = 600;
    for (double alpha : {0.3, 0.7})
      for (std::size_t n : {32u, 256u}) {
        const auto s = replicate_sweep(g, est(n, alpha, 1, GradMode::rep, seed++), 1000000);
        const auto p = gaussian_predictions(1, 0.2, alpha, n, 1, 0);
        const double ref = theorem1_expansion(p.at(PredictionKind::vr_bound_grad).value,
                                              p.at(PredictionKind::gamma_sq_grad).value, n);
        const double tol = 3.0 * std::sqrt(s.variance / 1e6) + 5.0 / static_cast<double>(n * n);
        const double gap = std::abs(s.mean - ref);
        ok = ok && gap <= tol;
        os << " (a=" << alpha << ",N=" << n << ") gap/tol=" << fmt("%.3f", gap / tol);
      }
    return Outcome{ok, os.str().substr(1)};
  });

  run(7, "weight collapse, N=4096 beta=100 R=2000", 30, [] {
    const std::size_t n = 4096;
    const auto s = simulate_collapse(n, 100.0, 2.0, 0.5, 2000, {707, 0});
    const double cap = 0.1 * std::sqrt(2.0 * std::log(static_cast<double>(n)));
    const bool ok = s.s_delta.mean >= 0.95 && s.s_delta.mean <= 1.05 && s.l1_gap.mean <= cap;
    return Outcome{ok, fmt("E[s_2]=%.5f", s.s_delta.mean) + fmt(" E|t1-max|=%.5f", s.l1_gap.mean) +
                           fmt(" (cap %.4f)", cap)};
  });

  run(8, "zeta identity and bound, 1e7 draws per point", 0, [] {
    bool ok = true;
    std::ostringstream os;
    std::uint64_t seed = 800;
    for (auto [s, sigma] : {std::pair{0.0, 1.0}, std::pair{1.0, 3.0}, std::pair{1.5, 4.0}}) {
      const auto cf = zeta_lognormal(s, sigma);
      const auto mc = zeta_mc(s, sigma, 10000000, seed++);
      const double z = std::abs(mc.zeta - cf.zeta) / mc.zeta_stderr;
      ok = ok && z <= 3.0;
      if (cf.bound) ok = ok && cf.zeta <= *cf.bound;
      os << " (" << s << "," << sigma << ") zeta=" << fmt("%.6f", cf.zeta) << " z=" << fmt("%.2f", z);
    }
    int violations = 0, cases = 0;
    for (double s = 0.5; s <= 6.0; s += 0.25)
      for (double sigma = 2.0 * s; sigma <= 100.0; sigma *= 1.25) {
        const auto z = zeta_lognormal(s, sigma);
        ++cases;
        if (!z.bound || z.zeta > *z.bound) ++violations;
      }
    ok = ok && violations == 0;
    os << "; bound violations " << violations << "/" << cases;
    return Outcome{ok, os.str().substr(1)};
  });

  run(9, "negative moment oracle, Exp(1) mu=1", 0, [] {
    auto L = [](double t) { return 1.0 / (1.0 + t); };
    bool ok = true;
    double prev = std::numeric_limits<double>::infinity(), worst = 0.0;
    for (int n : {2, 5, 20, 50}) {
      const double v = neg_moment_oracle(L, 1.0, n);
      worst = std::max(worst, std::abs(v - n / (n - 1.0)));
      ok = ok && v < prev;
      prev = v;
    }
    ok = ok && worst <= 1e-6;
    std::ostringstream os;
    os << "quadrature max err " << fmt("%.2g", worst);
    for (int n : {2, 5, 20}) {
      const std::size_t R = 1000000;
      std::vector<double> vals(R);
      parallel_blocks(R, default_workers(), [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
          Rng rng = child_stream(900 + static_cast<std::uint64_t>(n), r);
          double sum = 0.0;
          for (int j = 0; j < n; ++j) sum -= std::log(uniform_open01(rng));
          vals[r] = n / sum;
        }
      });
      const auto acc = accumulate(vals);
      const double z = std::abs(acc.mean - neg_moment_oracle(L, 1.0, n)) / acc.stderr_mean();
      ok = ok && z <= 3.0;
      os << "; N=" << n << " MC z=" << fmt("%.2f", z);
    }
    return Outcome{ok, os.str()};
  });

  run(10, "Mills bounds and max-of-Gaussians tail envelope", 0, [] {
    int violations = 0;
    for (int i = 0; i < 200; ++i) {
      const double u = 1e-3 * std::pow(50.0 / 1e-3, i / 199.0);
      const double m = mills_ratio(u);
      if (!(u / (u * u + 1.0) < m && m < 1.0 / u)) ++violations;
    }
    const auto t = max_tail_bounds(1024, 4.0, 1000000, 1010);
    const bool ok = violations == 0 && t.mc_tail <= t.envelope;
    return Outcome{ok, "Mills violations " + std::to_string(violations) + "/200; tail exceedances " +
                           std::to_string(t.exceedances) + "/1e6, envelope " + fmt("%.3g", t.envelope)};
  });

  run(11, "determinism of every preset across runs and worker counts {1, 8}", 0, [] {
    // Reduced grids (N <= 2^8, R = 50); full presets take minutes each.
    PresetOverrides ov;
    ov.max_n = 256;
    ov.replicates = 50;
    bool ok = true;
    std::ostringstream os;
    for (auto name : kPresetNames) {
      const auto cfg = preset_config(name, Scale::desk, ov);
      auto csv = [&](unsigned w, const char* stamp) {
        std::ostringstream s;
        write_sweep_csv(s, run_sweep(cfg, {w, stamp}));
        return s.str();
      };
      const auto a = csv(1, "run-a");
      const auto b = csv(8, "run-b");
      const auto c = csv(1, "run-c");
      const bool same = strip_timestamp(a) == strip_timestamp(b) && strip_timestamp(a) == strip_timestamp(c) && a != b;
      ok = ok && same;
      os << ' ' << name << (same ? "=ok" : "=DIFF");
    }
    return Outcome{ok, os.str().substr(1)};
  });

  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
