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


#ifndef VRIWAE_COLLAPSE_HPP
#define VRIWAE_COLLAPSE_HPP

#include <vriwae/models/reparam_model.hpp>
#include <vriwae/statcore/format.hpp>
#include <vriwae/statcore/log_weights.hpp>
#include <vriwae/statcore/moments.hpp>
#include <vriwae/statcore/normal.hpp>
#include <vriwae/statcore/parallel.hpp>
#include <vriwae/statcore/rng.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

/**
 * \file
 * \brief High-dimensional weight collapse: softmax(beta xi) of i.i.d. standard
 * normals, maxima of Gaussians, the truncated log-normal moment and the
 * collapse conditions of the Gaussian model.
 */

namespace vriwae {

struct SoftmaxWeightField {
  std::size_t N = 0;
  double beta = 0.0;
  std::vector<double> xi;
  std::vector<double> weights;
  std::size_t dominance_index = 0;
};

inline SoftmaxWeightField make_weight_field(std::vector<double> xi, double beta) {
  if (xi.empty()) throw std::invalid_argument("weight field needs at least one draw");
  if (!(beta >= 0.0)) throw std::domain_error("beta must be >= 0");
  SoftmaxWeightField field;
  field.N = xi.size();
  field.beta = beta;
  field.weights.resize(xi.size());
  self_normalize_into(xi, field.weights, beta);
  field.dominance_index =
      static_cast<std::size_t>(std::max_element(xi.begin(), xi.end()) - xi.begin());
  field.xi = std::move(xi);
  return field;
}

template <class Engine>
SoftmaxWeightField sample_weight_field(std::size_t n, double beta, Engine& engine) {
  std::vector<double> xi(n);
  NormalSampler normal;
  normal.fill(xi, engine);
  return make_weight_field(std::move(xi), beta);
}

/// Statistics of one weight field.
/**
 * t1 = sum W xi, t_delta = sum W^delta xi, t_mix = sum (lambda W + (1 - lambda) W^2) xi,
 * s_delta = sum W^delta, l1_gap = |t1 - max xi|.
 */
struct CollapseStats {
  double t1 = 0.0;
  double t_delta = 0.0;
  double t_mix = 0.0;
  double s_delta = 0.0;
  double max_xi = 0.0;
  double l1_gap = 0.0;
};

inline CollapseStats collapse_stats(const SoftmaxWeightField& field, double delta, double lambda) {
  CollapseStats st;
  for (std::size_t j = 0; j < field.N; ++j) {
    const double w = field.weights[j];
    const double wd = delta == 1.0 ? w : (delta == 2.0 ? w * w : std::pow(w, delta));
    const double x = field.xi[j];
    st.t1 += w * x;
    st.t_delta += wd * x;
    st.t_mix += (lambda * w + (1.0 - lambda) * w * w) * x;
    st.s_delta += wd;
  }
  st.max_xi = field.xi[field.dominance_index];
  st.l1_gap = std::abs(st.t1 - st.max_xi);
  return st;
}

struct CollapseSummary {
  std::size_t N = 0;
  double beta = 0.0;
  double delta = 1.0;
  double lambda = 0.0;
  std::size_t replicates = 0;
  MomentAccumulator t1, t_delta, t_mix, s_delta, max_xi, l1_gap;

  static constexpr std::array<const char*, 6> kStatNames{"t1", "t_delta", "t_mix", "s_delta", "max_xi", "l1_gap"};

  [[nodiscard]] const MomentAccumulator& stat(std::size_t i) const {
    const std::array<const MomentAccumulator*, 6> all{&t1, &t_delta, &t_mix, &s_delta, &max_xi, &l1_gap};
    return *all.at(i);
  }
};

struct CollapseOptions {
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = default_workers()
};

/// R replicate weight fields; replicate r draws from child_stream(seed, r).
inline CollapseSummary simulate_collapse(std::size_t n, double beta, double delta, double lambda,
                                         std::size_t replicates, const CollapseOptions& opts = {}) {
  if (n < 2) throw std::invalid_argument("simulate_collapse requires N >= 2");
  if (!(beta >= 0.0)) throw std::domain_error("beta must be >= 0");
  if (!(delta >= 1.0)) throw std::domain_error("delta must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::domain_error("lambda must lie in [0, 1]");
  if (replicates < 2) throw std::invalid_argument("simulate_collapse requires R >= 2");
  std::vector<CollapseStats> per(replicates);
  const unsigned workers = opts.workers ? opts.workers : default_workers();
  parallel_blocks(replicates, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng = child_stream(opts.seed, r);
      per[r] = collapse_stats(sample_weight_field(n, beta, rng), delta, lambda);
    }
  });
  CollapseSummary out;
  out.N = n;
  out.beta = beta;
  out.delta = delta;
  out.lambda = lambda;
  out.replicates = replicates;
  for (const auto& st : per) {
    out.t1.push(st.t1);
    out.t_delta.push(st.t_delta);
    out.t_mix.push(st.t_mix);
    out.s_delta.push(st.s_delta);
    out.max_xi.push(st.max_xi);
    out.l1_gap.push(st.l1_gap);
  }
  return out;
}

inline void write_collapse_csv_header(std::ostream& os) { os << "N,beta,delta,lambda,stat,mean,var,stderr\n"; }

inline void write_collapse_csv_rows(std::ostream& os, const CollapseSummary& s) {
  for (std::size_t i = 0; i < CollapseSummary::kStatNames.size(); ++i) {
    const auto& acc = s.stat(i);
    os << s.N << ',' << format_g17(s.beta) << ',' << format_g17(s.delta) << ',' << format_g17(s.lambda) << ','
       << CollapseSummary::kStatNames[i] << ',' << format_g17(acc.mean) << ',' << format_g17(acc.variance()) << ','
       << format_g17(acc.stderr_mean()) << '\n';
  }
}

struct MaxMomentResult {
  double mc_mean = 0.0;    // E|M_N|^m
  double mc_stderr = 0.0;
  double signed_mean = 0.0;  // E M_N
  double signed_stderr = 0.0;
  double reference = 0.0;  // (2 log N)^{m/2}
  double rel_gap = 0.0;    // mc_mean / reference - 1
};

/// Monte Carlo E|max of N standard normals|^m, plus the signed mean E max.
inline MaxMomentResult max_gaussian_moment(std::size_t n, double m, std::size_t replicates, std::uint64_t seed = 0,
                                           unsigned workers = 0) {
  if (n < 2) throw std::invalid_argument("max_gaussian_moment requires N >= 2");
  if (!(m >= 1.0)) throw std::domain_error("moment order must be >= 1");
  if (replicates < 2) throw std::invalid_argument("max_gaussian_moment requires R >= 2");
  std::vector<double> values(replicates), maxima(replicates);
  parallel_blocks(replicates, workers ? workers : default_workers(), [&](std::size_t begin, std::size_t end) {
    NormalSampler normal;
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng = child_stream(seed, r);
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, normal(rng));
      maxima[r] = mx;
      values[r] = std::pow(std::abs(mx), m);
    }
  });
  const auto acc = accumulate(values);
  const auto signed_acc = accumulate(maxima);
  MaxMomentResult out;
  out.mc_mean = acc.mean;
  out.mc_stderr = acc.stderr_mean();
  out.signed_mean = signed_acc.mean;
  out.signed_stderr = signed_acc.stderr_mean();
  out.reference = std::pow(2.0 * std::log(static_cast<double>(n)), m / 2.0);
  out.rel_gap = out.mc_mean / out.reference - 1.0;
  return out;
}

struct MaxTailResult {
  double threshold = 0.0;       // u = sqrt(2 (1 + c) log N)
  std::size_t replicates = 0;
  std::size_t exceedances = 0;
  double mc_tail = 0.0;
  double mc_stderr = 0.0;
  double exact = 0.0;           // 1 - Phi(u)^N
  double envelope = 0.0;        // 1 - (1 - phi(u) / u)^N
  double asymptotic_bound = 0.0;  // K (log N)^{-1/2} N^{-c}
  double K = 5.0;
};

namespace detail {

inline double one_minus_pow_one_minus(double p, std::size_t n) {
  if (p >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-p));
}

}  // namespace detail

/// Closed-form parts of the max tail: exact probability, envelope and asymptotic bound.
inline MaxTailResult max_tail_reference(std::size_t n, double c, double K = 5.0) {
  if (n < 2) throw std::invalid_argument("max_tail_bounds requires N >= 2");
  if (!(c > 0.0)) throw std::domain_error("c must be positive");
  MaxTailResult out;
  const double log_n = std::log(static_cast<double>(n));
  out.threshold = std::sqrt(2.0 * (1.0 + c) * log_n);
  out.exact = detail::one_minus_pow_one_minus(normal_sf(out.threshold), n);
  out.envelope = detail::one_minus_pow_one_minus(normal_pdf(out.threshold) / out.threshold, n);
  out.K = K;
  out.asymptotic_bound = K / std::sqrt(log_n) * std::exp(-c * log_n);
  return out;
}

/// Monte Carlo P(M_N > u) alongside the closed-form references.
inline MaxTailResult max_tail_bounds(std::size_t n, double c, std::size_t replicates, std::uint64_t seed = 0,
                                     unsigned workers = 0, double K = 5.0) {
  if (replicates < 2) throw std::invalid_argument("max_tail_bounds requires R >= 2");
  MaxTailResult out = max_tail_reference(n, c, K);
  std::vector<unsigned char> hit(replicates, 0);
  const double u = out.threshold;
  parallel_blocks(replicates, workers ? workers : default_workers(), [&](std::size_t begin, std::size_t end) {
    NormalSampler normal;
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng = child_stream(seed, r);
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, normal(rng));
      hit[r] = mx > u ? 1 : 0;
    }
  });
  out.replicates = replicates;
  for (auto h : hit) out.exceedances += h;
  const double R = static_cast<double>(replicates);
  out.mc_tail = static_cast<double>(out.exceedances) / R;
  out.mc_stderr = std::sqrt(out.mc_tail * (1.0 - out.mc_tail) / (R - 1.0));
  return out;
}

struct ZetaValue {
  double conditional_moment = 0.0;  // E(e^{sigma (Z - s)} | Z <= s)
  double zeta = 0.0;                // conditional_moment / (1 - Phi(s))
  std::optional<double> bound;      // C s / sigma when sigma >= 2 s >= 1
};

/// Constant of the bound zeta(s) <= C s / sigma: 6 / Phi(1).
inline double zeta_bound_constant() { return 6.0 / normal_cdf(1.0); }

/// Closed form Phi(s - sigma) / Phi(s) * phi(s) / phi(sigma - s); mu cancels.
inline ZetaValue zeta_lognormal(double s, double sigma, double mu = 0.0) {
  (void)mu;
  if (!(sigma > 0.0)) throw std::domain_error("zeta_lognormal: sigma must be positive");
  const double log_cond =
      normal_log_cdf(s - sigma) - normal_log_cdf(s) + normal_log_pdf(s) - normal_log_pdf(sigma - s);
  ZetaValue out;
  out.conditional_moment = std::exp(log_cond);
  out.zeta = std::exp(log_cond - normal_log_cdf(-s));
  if (sigma >= 2.0 * s && 2.0 * s >= 1.0) out.bound = zeta_bound_constant() * s / sigma;
  return out;
}

struct ZetaMcResult {
  double conditional_moment = 0.0;
  double conditional_stderr = 0.0;
  double zeta = 0.0;
  double zeta_stderr = 0.0;
  std::size_t accepted = 0;
};

/// Rejection sampler: Z ~ N(0, 1), keep Z <= s, average e^{sigma (Z - s)}.
inline ZetaMcResult zeta_mc(double s, double sigma, std::size_t draws, std::uint64_t seed = 0,
                            unsigned workers = 0) {
  if (!(sigma > 0.0)) throw std::domain_error("zeta_mc: sigma must be positive");
  constexpr std::size_t kBlock = 1 << 16;
  const std::size_t blocks = (draws + kBlock - 1) / kBlock;
  std::vector<MomentAccumulator> part(blocks);
  parallel_blocks(blocks, workers ? workers : default_workers(), [&](std::size_t begin, std::size_t end) {
    NormalSampler normal;
    for (std::size_t b = begin; b < end; ++b) {
      Rng rng = child_stream(seed, b);
      const std::size_t count = std::min(kBlock, draws - b * kBlock);
      for (std::size_t i = 0; i < count; ++i) {
        const double z = normal(rng);
        if (z <= s) part[b].push(std::exp(sigma * (z - s)));
      }
    }
  });
  MomentAccumulator acc;
  for (const auto& p : part) acc.merge(p);
  if (acc.count < 2) throw std::runtime_error("zeta_mc: fewer than 2 accepted draws");
  ZetaMcResult out;
  out.accepted = acc.count;
  out.conditional_moment = acc.mean;
  out.conditional_stderr = acc.stderr_mean();
  const double sf = normal_sf(s);
  out.zeta = acc.mean / sf;
  out.zeta_stderr = out.conditional_stderr / sf;
  return out;
}

/// Collapse conditions of the Gaussian model (theta = eps * 1, phi = 0).
/**
 * B_d = eps sqrt(d), snr_N1 = eps (single-sample REP SNR),
 * growing_ratio = log N / B_d^2, snr_cond = snr_N1 sqrt(log N) / B_d.
 * The collapse verdict compares growing_ratio and snr_cond^2 (both on the
 * log N / d scale) against `threshold`.
 */
struct CollapseConditionReport {
  double B_d = 0.0;
  double log_N = 0.0;
  double growing_ratio = 0.0;
  double snr_N1 = 0.0;
  double snr_cond = 0.0;
  double threshold = 0.1;
  bool collapse_regime = false;
  bool drep_snr_unbounded = false;
  std::vector<std::string> verdicts;
};

inline CollapseConditionReport collapse_report(double eps, std::size_t n, std::size_t d, GradMode mode = GradMode::rep,
                                               double threshold = 0.1) {
  if (!(eps > 0.0)) throw std::domain_error("collapse_report: eps must be positive");
  if (n == 0 || d == 0) throw std::invalid_argument("collapse_report: N and d must be positive");
  CollapseConditionReport r;
  r.threshold = threshold;
  r.B_d = eps * std::sqrt(static_cast<double>(d));
  r.log_N = std::log(static_cast<double>(n));
  r.growing_ratio = r.log_N / (r.B_d * r.B_d);
  r.snr_N1 = eps;
  r.snr_cond = r.snr_N1 * std::sqrt(r.log_N) / r.B_d;
  r.collapse_regime = r.growing_ratio < threshold && r.snr_cond * r.snr_cond < threshold;
  if (n == 1) r.verdicts.emplace_back("single sample baseline");
  r.verdicts.emplace_back(r.collapse_regime ? "collapse regime" : "fixed-d asymptotics");
  if (mode == GradMode::drep) {
    // Zero-variance single-sample DREP estimator: the rate condition is not evaluated.
    r.drep_snr_unbounded = true;
    r.verdicts.emplace_back("assertion (ii) regime");
  }
  return r;
}

}  // namespace vriwae

#endif  // VRIWAE_COLLAPSE_HPP
