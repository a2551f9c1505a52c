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

#ifndef VRIWAE_ESTIMATORS_HPP
#define VRIWAE_ESTIMATORS_HPP

#include <vriwae/models/reparam_model.hpp>
#include <vriwae/statcore/log_weights.hpp>
#include <vriwae/statcore/moments.hpp>
#include <vriwae/statcore/parallel.hpp>
#include <vriwae/statcore/rng.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

/**
 * \file
 * \brief Monte Carlo estimators of the VR-IWAE bound and of its gradient.
 *
 * With log-weights l_1..l_N and normalized weights w_j = softmax((1 - alpha) l)_j:
 *
 *   bound  = (LSE((1 - alpha) l) - log N) / (1 - alpha)
 *   REP    = (1/M) sum_m sum_j w_j * d_psi log w(noise_j)
 *   DREP   = (1/M) sum_m sum_j (alpha w_j + (1 - alpha) w_j^2) * d_psi' log w(noise_j)|_{phi'=phi}
 */

namespace vriwae {

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::domain_error("alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
}

struct EstimatorConfig {
  std::size_t M = 1;
  std::size_t N = 1;
  double alpha = 0.0;
  std::size_t psi = 0;
  GradMode mode = GradMode::rep;
  std::uint64_t seed = 0;

  template <ReparamModel Model>
  void validate(const Model& model) const {
    if (M == 0) throw std::invalid_argument("M must be positive");
    if (N == 0) throw std::invalid_argument("N must be positive");
    check_alpha(alpha);
    check_psi(model, psi, mode);
  }
};

/// One group of N importance samples with everything the estimators need.
struct GradSampleBatch {
  std::vector<double> log_ws;
  std::vector<double> norm_ws;
  std::vector<double> partials;
  std::vector<double> h_weights;  // DREP only
};

/// (alpha w + (1 - alpha) w^2) for each normalized weight.
inline void drep_weights_into(std::span<const double> norm_ws, double alpha, std::span<double> out) {
  for (std::size_t j = 0; j < norm_ws.size(); ++j) {
    out[j] = alpha * norm_ws[j] + (1.0 - alpha) * norm_ws[j] * norm_ws[j];
  }
}

/// Bound estimate from one set of log-weights.
inline double vriwae_bound_from_log_weights(std::span<const double> log_ws, double alpha) {
  check_alpha(alpha);
  std::vector<double> scaled(log_ws.size());
  for (std::size_t j = 0; j < log_ws.size(); ++j) {
    scaled[j] = (1.0 - alpha) * log_ws[j];
  }
  return (log_sum_exp(scaled) - std::log(static_cast<double>(log_ws.size()))) / (1.0 - alpha);
}

/// Gradient estimate from materialized log-weights and partials.
inline double gradient_from_log_weights(std::span<const double> log_ws, std::span<const double> partials, double alpha,
                                        GradMode mode) {
  check_alpha(alpha);
  std::vector<double> w(log_ws.size());
  self_normalize_into(log_ws, w, 1.0 - alpha);
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double h = mode == GradMode::rep ? w[j] : alpha * w[j] + (1.0 - alpha) * w[j] * w[j];
    acc += h * partials[j];
  }
  return acc;
}

/// Per-worker scratch buffers; reused across replicates.
struct EstimatorWorkspace {
  NormalSampler normal;
  std::vector<double> noise;
  std::vector<double> log_ws;
  std::vector<double> norm_ws;
  std::vector<double> partials;

  void prepare(std::size_t d, std::size_t n) {
    noise.resize(d);
    log_ws.resize(n);
    norm_ws.resize(n);
    partials.resize(n);
  }
};

template <ReparamModel Model, class Engine>
GradSampleBatch draw_batch(const Model& model, std::size_t n, double alpha, std::size_t psi, GradMode mode,
                           Engine& engine) {
  check_alpha(alpha);
  check_psi(model, psi, mode);
  if (n == 0) throw std::invalid_argument("N must be positive");
  GradSampleBatch batch;
  batch.log_ws.resize(n);
  batch.norm_ws.resize(n);
  batch.partials.resize(n);
  NormalSampler normal;
  std::vector<double> noise(model.noise_dim());
  for (std::size_t j = 0; j < n; ++j) {
    sample_noise(noise, engine, normal);
    batch.log_ws[j] = model.log_weight(noise);
    batch.partials[j] = d_psi_log_weight(model, noise, psi, mode);
  }
  self_normalize_into(batch.log_ws, batch.norm_ws, 1.0 - alpha);
  if (mode == GradMode::drep) {
    batch.h_weights.resize(n);
    drep_weights_into(batch.norm_ws, alpha, batch.h_weights);
  }
  return batch;
}

/// Single draw of the bound estimator (N samples).
template <ReparamModel Model, class Engine>
double vriwae_bound_estimate(const Model& model, std::size_t n, double alpha, Engine& engine) {
  check_alpha(alpha);
  if (n == 0) throw std::invalid_argument("N must be positive");
  NormalSampler normal;
  std::vector<double> noise(model.noise_dim());
  std::vector<double> scaled(n);
  for (std::size_t j = 0; j < n; ++j) {
    sample_noise(noise, engine, normal);
    scaled[j] = (1.0 - alpha) * model.log_weight(noise);
  }
  return (log_sum_exp(scaled) - std::log(static_cast<double>(n))) / (1.0 - alpha);
}

namespace detail {

template <ReparamModel Model, class Engine>
double gradient_draw(const Model& model, const EstimatorConfig& cfg, Engine& engine, EstimatorWorkspace& ws) {
  ws.prepare(model.noise_dim(), cfg.N);
  const double scale = 1.0 - cfg.alpha;
  double total = 0.0;
  for (std::size_t m = 0; m < cfg.M; ++m) {
    for (std::size_t j = 0; j < cfg.N; ++j) {
      sample_noise(ws.noise, engine, ws.normal);
      ws.log_ws[j] = model.log_weight(ws.noise);
      if constexpr (AnalyticPartials<Model>) {
        ws.partials[j] = model.d_log_weight(ws.noise, cfg.psi, cfg.mode);
      } else {
        ws.partials[j] = fd_log_weight_partial(model, ws.noise, cfg.psi, cfg.mode);
      }
    }
    self_normalize_into(ws.log_ws, ws.norm_ws, scale);
    double inner = 0.0;
    if (cfg.mode == GradMode::rep) {
      for (std::size_t j = 0; j < cfg.N; ++j) inner += ws.norm_ws[j] * ws.partials[j];
    } else {
      for (std::size_t j = 0; j < cfg.N; ++j) {
        const double w = ws.norm_ws[j];
        inner += (cfg.alpha * w + scale * w * w) * ws.partials[j];
      }
    }
    total += inner;
  }
  return total / static_cast<double>(cfg.M);
}

}  // namespace detail

/// One draw of the REP or DREP estimator according to cfg.mode.
template <ReparamModel Model, class Engine>
double gradient_estimate(const Model& model, const EstimatorConfig& cfg, Engine& engine) {
  cfg.validate(model);
  EstimatorWorkspace ws;
  return detail::gradient_draw(model, cfg, engine, ws);
}

template <ReparamModel Model, class Engine>
double rep_gradient(const Model& model, const EstimatorConfig& cfg, Engine& engine) {
  if (cfg.mode != GradMode::rep) throw std::invalid_argument("rep_gradient requires mode = rep");
  return gradient_estimate(model, cfg, engine);
}

template <ReparamModel Model, class Engine>
double drep_gradient(const Model& model, const EstimatorConfig& cfg, Engine& engine) {
  if (cfg.mode != GradMode::drep) throw std::invalid_argument("drep_gradient requires mode = drep");
  return gradient_estimate(model, cfg, engine);
}

/// Frozen noise for common-random-number comparisons: `count` draws of dimension `dim`.
struct NoiseBlock {
  std::size_t dim = 0;
  std::size_t count = 0;
  std::vector<double> values;

  [[nodiscard]] std::span<const double> draw(std::size_t j) const { return {values.data() + j * dim, dim}; }
};

template <class Engine>
NoiseBlock draw_noise_block(std::size_t dim, std::size_t count, Engine& engine) {
  NoiseBlock block{dim, count, std::vector<double>(dim * count)};
  NormalSampler normal;
  normal.fill(block.values, engine);
  return block;
}

/// Bound estimator re-evaluated on frozen noise (block.count = N).
template <ReparamModel Model>
double vriwae_bound_on_noise(const Model& model, const NoiseBlock& block, double alpha) {
  std::vector<double> log_ws(block.count);
  for (std::size_t j = 0; j < block.count; ++j) {
    log_ws[j] = model.log_weight(block.draw(j));
  }
  return vriwae_bound_from_log_weights(log_ws, alpha);
}

/// Gradient estimator (M = 1) re-evaluated on frozen noise.
template <ReparamModel Model>
double gradient_on_noise(const Model& model, const NoiseBlock& block, double alpha, std::size_t psi, GradMode mode) {
  check_psi(model, psi, mode);
  std::vector<double> log_ws(block.count);
  std::vector<double> partials(block.count);
  for (std::size_t j = 0; j < block.count; ++j) {
    log_ws[j] = model.log_weight(block.draw(j));
    partials[j] = d_psi_log_weight(model, block.draw(j), psi, mode);
  }
  return gradient_from_log_weights(log_ws, partials, alpha, mode);
}

struct SweepOptions {
  unsigned workers = 0;  // 0 = default_workers()
};

/// R independent estimator draws; replicate r uses child_stream(cfg.seed, r).
template <ReparamModel Model>
std::vector<double> replicate_values(const Model& model, const EstimatorConfig& cfg, std::size_t replicates,
                                     const SweepOptions& opts = {}) {
  cfg.validate(model);
  std::vector<double> values(replicates);
  const unsigned workers = opts.workers ? opts.workers : default_workers();
  parallel_blocks(replicates, workers, [&](std::size_t begin, std::size_t end) {
    EstimatorWorkspace ws;
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng = child_stream(cfg.seed, r);
      values[r] = detail::gradient_draw(model, cfg, rng, ws);
    }
  });
  return values;
}

/// Replicate reduction through MomentAccumulator in replicate order.
template <ReparamModel Model>
SnrValue replicate_sweep(const Model& model, const EstimatorConfig& cfg, std::size_t replicates,
                         const SweepOptions& opts = {}) {
  if (replicates < 2) throw std::invalid_argument("replicate_sweep requires R >= 2");
  const auto values = replicate_values(model, cfg, replicates, opts);
  return snr_of_samples(values);
}

/// R independent bound draws, replicate r on child_stream(seed, r).
template <ReparamModel Model>
std::vector<double> bound_replicates(const Model& model, std::size_t n, double alpha, std::uint64_t seed,
                                     std::size_t replicates, const SweepOptions& opts = {}) {
  check_alpha(alpha);
  std::vector<double> values(replicates);
  const unsigned workers = opts.workers ? opts.workers : default_workers();
  parallel_blocks(replicates, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng = child_stream(seed, r);
      values[r] = vriwae_bound_estimate(model, n, alpha, rng);
    }
  });
  return values;
}

}  // namespace vriwae

#endif  // VRIWAE_ESTIMATORS_HPP
