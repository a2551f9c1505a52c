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

#ifndef VRIWAE_MODELS_GAUSSIAN_HPP
#define VRIWAE_MODELS_GAUSSIAN_HPP

#include <vriwae/models/reparam_model.hpp>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace vriwae {

/// p_theta(z|x) = N(z; theta, I_d), q_phi(z|x) = N(z; phi, I_d), z = noise + phi'.
/**
 * Only the posterior is specified, so log p_theta(x) is a free constant
 * (`log_evidence`, default 0). Normalized weights, gradients in phi and every
 * SNR are invariant to it.
 */
class GaussianModel {
 public:
  GaussianModel(std::vector<double> theta, std::vector<double> phi, double log_evidence = 0.0)
      : d_(theta.size()), log_evidence_(log_evidence) {
    detail::check_dim(phi.size(), d_, "phi");
    params_ = std::move(theta);
    params_.insert(params_.end(), phi.begin(), phi.end());
    refresh();
  }

  /// theta = eps * (1, ..., 1), phi = 0.
  static GaussianModel offset(std::size_t d, double eps, double log_evidence = 0.0) {
    return GaussianModel(std::vector<double>(d, eps), std::vector<double>(d, 0.0), log_evidence);
  }

  [[nodiscard]] std::size_t noise_dim() const noexcept { return d_; }
  [[nodiscard]] std::size_t theta_dim() const noexcept { return d_; }
  [[nodiscard]] std::size_t phi_dim() const noexcept { return d_; }
  [[nodiscard]] std::span<const double> params() const noexcept { return params_; }
  [[nodiscard]] std::span<const double> theta() const noexcept { return {params_.data(), d_}; }
  [[nodiscard]] std::span<const double> phi() const noexcept { return {params_.data() + d_, d_}; }
  [[nodiscard]] double log_evidence() const noexcept { return log_evidence_; }

  [[nodiscard]] GaussianModel with_params(std::span<const double> values) const {
    detail::check_dim(values.size(), 2 * d_, "params");
    return GaussianModel({values.begin(), values.begin() + static_cast<std::ptrdiff_t>(d_)},
                         {values.begin() + static_cast<std::ptrdiff_t>(d_), values.end()}, log_evidence_);
  }

  [[nodiscard]] std::size_t theta_index(std::size_t k) const noexcept { return k; }
  [[nodiscard]] std::size_t phi_index(std::size_t k) const noexcept { return d_ + k; }

  [[nodiscard]] std::string psi_label(std::size_t psi) const {
    return psi < d_ ? "theta_" + std::to_string(psi + 1) : "phi_" + std::to_string(psi - d_ + 1);
  }

  /// log w at phi' = phi: const - ||theta - phi||^2 / 2 - <noise, phi - theta>.
  [[nodiscard]] double log_weight(std::span<const double> noise) const {
    detail::check_dim(noise.size(), d_, "noise");
    double dot = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
      dot += noise[k] * diff_[k];
    }
    return base_ - dot;
  }

  /// log w with the sample point at phi' and the q density at phi.
  [[nodiscard]] double log_weight(std::span<const double> noise, std::span<const double> phi_prime) const {
    detail::check_dim(noise.size(), d_, "noise");
    detail::check_dim(phi_prime.size(), d_, "phi'");
    const auto th = theta();
    const auto ph = phi();
    double to_theta = 0.0;
    double to_phi = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
      const double z = noise[k] + phi_prime[k];
      to_theta += (z - th[k]) * (z - th[k]);
      to_phi += (z - ph[k]) * (z - ph[k]);
    }
    return log_evidence_ - 0.5 * to_theta + 0.5 * to_phi;
  }

  /// REP: d/dtheta_k = z_k - theta_k, d/dphi_k = -(noise_k + phi_k - theta_k).
  /// DREP: d/dphi'_k = theta_k - phi_k, independent of the noise.
  [[nodiscard]] double d_log_weight(std::span<const double> noise, std::size_t psi, GradMode mode) const {
    check_psi(*this, psi, mode);
    detail::check_dim(noise.size(), d_, "noise");
    const std::size_t k = psi < d_ ? psi : psi - d_;
    if (psi < d_) {
      return noise[k] + diff_[k];
    }
    if (mode == GradMode::drep) {
      return -diff_[k];
    }
    return -(noise[k] + diff_[k]);
  }

 private:
  void refresh() {
    diff_.resize(d_);
    double sq = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
      diff_[k] = params_[d_ + k] - params_[k];
      sq += diff_[k] * diff_[k];
    }
    base_ = log_evidence_ - 0.5 * sq;
  }

  std::size_t d_;
  double log_evidence_;
  std::vector<double> params_;
  std::vector<double> diff_;  // phi - theta
  double base_ = 0.0;
};

}  // namespace vriwae

#endif  // VRIWAE_MODELS_GAUSSIAN_HPP
