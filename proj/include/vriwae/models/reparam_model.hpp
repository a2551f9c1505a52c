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

#ifndef VRIWAE_MODELS_REPARAM_MODEL_HPP
#define VRIWAE_MODELS_REPARAM_MODEL_HPP

#include <vriwae/statcore/rng.hpp>

#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

/**
 * \file
 * \brief The reparameterized-model contract shared by every estimator.
 *
 * A model owns a parameter vector laid out as (theta_1..theta_a, phi_1..phi_b)
 * and a noise dimension d with noise distribution N(0, I_d). It evaluates
 *
 *   log w(noise; phi') = log p_theta(x, f(noise, phi')) - log q_phi(f(noise, phi') | x),
 *
 * where the sample point moves with phi' while the density in the denominator
 * stays at the model's own phi. Partial derivatives come in two flavours:
 *
 *  - GradMode::rep: total derivative of log w(noise; phi) in a component of
 *    (theta, phi), with phi' tied to phi;
 *  - GradMode::drep: derivative in phi'_k at phi' = phi with q_phi fixed.
 */

namespace vriwae {

enum class GradMode { rep, drep };

inline const char* to_string(GradMode mode) noexcept { return mode == GradMode::rep ? "rep" : "drep"; }

template <class M>
concept ReparamModel = requires(const M& m, std::span<const double> noise, std::span<const double> values) {
  { m.noise_dim() } -> std::convertible_to<std::size_t>;
  { m.theta_dim() } -> std::convertible_to<std::size_t>;
  { m.phi_dim() } -> std::convertible_to<std::size_t>;
  { m.params() } -> std::convertible_to<std::span<const double>>;
  { m.with_params(values) } -> std::same_as<M>;
  { m.log_weight(noise) } -> std::convertible_to<double>;
  { m.log_weight(noise, values) } -> std::convertible_to<double>;
  { m.psi_label(std::size_t{}) } -> std::convertible_to<std::string>;
};

/// Models that provide hand-derived partials.
template <class M>
concept AnalyticPartials = ReparamModel<M> && requires(const M& m, std::span<const double> noise, std::size_t psi,
                                                       GradMode mode) {
  { m.d_log_weight(noise, psi, mode) } -> std::convertible_to<double>;
};

/// Throws unless `psi` is a valid index for `mode`.
template <ReparamModel M>
void check_psi(const M& model, std::size_t psi, GradMode mode) {
  const std::size_t total = model.theta_dim() + model.phi_dim();
  if (psi >= total) {
    throw std::out_of_range("psi index " + std::to_string(psi) + " outside parameter vector of size " +
                            std::to_string(total));
  }
  if (mode == GradMode::drep && psi < model.theta_dim()) {
    throw std::invalid_argument("DREP defined for phi components only");
  }
}

/// Writes one noise draw from q = N(0, I_d) into `out`.
template <class Engine>
void sample_noise(std::span<double> out, Engine& engine, NormalSampler& normal) {
  normal.fill(out, engine);
}

/// Central finite difference of log w in component `psi`.
/**
 * In REP mode the whole model is perturbed (sample point and q density move
 * together, or theta moves); in DREP mode only phi' moves.
 */
template <ReparamModel M>
double fd_log_weight_partial(const M& model, std::span<const double> noise, std::size_t psi, GradMode mode,
                             double step = 1e-5) {
  check_psi(model, psi, mode);
  std::vector<double> params(model.params().begin(), model.params().end());
  if (mode == GradMode::rep) {
    const double base = params[psi];
    params[psi] = base + step;
    const M plus = model.with_params(params);
    params[psi] = base - step;
    const M minus = model.with_params(params);
    return (plus.log_weight(noise) - minus.log_weight(noise)) / (2.0 * step);
  }
  const std::size_t offset = model.theta_dim();
  std::vector<double> phi_prime(params.begin() + static_cast<std::ptrdiff_t>(offset), params.end());
  const std::size_t k = psi - offset;
  const double base = phi_prime[k];
  phi_prime[k] = base + step;
  const double up = model.log_weight(noise, phi_prime);
  phi_prime[k] = base - step;
  const double down = model.log_weight(noise, phi_prime);
  return (up - down) / (2.0 * step);
}

/// Partial of log w in component `psi`: analytic when the model has it, finite differences otherwise.
template <ReparamModel M>
double d_psi_log_weight(const M& model, std::span<const double> noise, std::size_t psi, GradMode mode) {
  check_psi(model, psi, mode);
  if constexpr (AnalyticPartials<M>) {
    return model.d_log_weight(noise, psi, mode);
  } else {
    return fd_log_weight_partial(model, noise, psi, mode);
  }
}

namespace detail {

inline void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string("dimension mismatch for ") + what + ": got " + std::to_string(got) +
                                ", expected " + std::to_string(want));
  }
}

}  // namespace detail

}  // namespace vriwae

#endif  // VRIWAE_MODELS_REPARAM_MODEL_HPP
