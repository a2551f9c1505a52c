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

#ifndef VRIWAE_MODELS_LINEAR_GAUSSIAN_HPP
#define VRIWAE_MODELS_LINEAR_GAUSSIAN_HPP

#include <vriwae/models/reparam_model.hpp>
#include <vriwae/statcore/normal.hpp>

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace vriwae {

/// Linear Gaussian latent model with an amortized Gaussian encoder.
/**
 * Generative model: z ~ N(theta, I_d), x | z ~ N(z, I_d), so p_theta(x) = N(x; theta, 2 I_d).
 * Encoder: q_phi(z|x) = N(z; a * x + b, 2/3 I_d) with phi = (a, b) and A = diag(a).
 * Reparameterization: z = sqrt(2/3) * noise + a' * x + b'.
 *
 * Parameter layout: (theta_1..theta_d, a_1..a_d, b_1..b_d).
 */
class LinearGaussianModel {
 public:
  static constexpr double kEncoderVariance = 2.0 / 3.0;

  LinearGaussianModel(std::vector<double> theta, std::vector<double> a, std::vector<double> b, std::vector<double> x)
      : d_(theta.size()), x_(std::move(x)) {
    detail::check_dim(a.size(), d_, "a");
    detail::check_dim(b.size(), d_, "b");
    detail::check_dim(x_.size(), d_, "x");
    params_ = std::move(theta);
    params_.insert(params_.end(), a.begin(), a.end());
    params_.insert(params_.end(), b.begin(), b.end());
    refresh();
  }

  [[nodiscard]] std::size_t noise_dim() const noexcept { return d_; }
  [[nodiscard]] std::size_t theta_dim() const noexcept { return d_; }
  [[nodiscard]] std::size_t phi_dim() const noexcept { return 2 * d_; }
  [[nodiscard]] std::span<const double> params() const noexcept { return params_; }
  [[nodiscard]] std::span<const double> theta() const noexcept { return {params_.data(), d_}; }
  [[nodiscard]] std::span<const double> a() const noexcept { return {params_.data() + d_, d_}; }
  [[nodiscard]] std::span<const double> b() const noexcept { return {params_.data() + 2 * d_, d_}; }
  [[nodiscard]] std::span<const double> x() const noexcept { return x_; }

  [[nodiscard]] LinearGaussianModel with_params(std::span<const double> values) const {
    detail::check_dim(values.size(), 3 * d_, "params");
    const auto at = [&](std::size_t block) {
      return std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(block * d_),
                                 values.begin() + static_cast<std::ptrdiff_t>((block + 1) * d_));
    };
    return LinearGaussianModel(at(0), at(1), at(2), x_);
  }

  [[nodiscard]] std::size_t theta_index(std::size_t k) const noexcept { return k; }
  [[nodiscard]] std::size_t a_index(std::size_t k) const noexcept { return d_ + k; }
  [[nodiscard]] std::size_t b_index(std::size_t k) const noexcept { return 2 * d_ + k; }

  [[nodiscard]] std::string psi_label(std::size_t psi) const {
    if (psi < d_) return "theta_" + std::to_string(psi + 1);
    if (psi < 2 * d_) return "a_" + std::to_string(psi - d_ + 1);
    return "b_" + std::to_string(psi - 2 * d_ + 1);
  }

  /// log p_theta(x) = log N(x; theta, 2 I_d).
  [[nodiscard]] double log_evidence() const {
    const auto th = theta();
    double sq = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
      sq += (x_[k] - th[k]) * (x_[k] - th[k]);
    }
    return -0.5 * static_cast<double>(d_) * std::log(2.0 * std::numbers::pi * 2.0) - sq / 4.0;
  }

  /// Encoder mean a * x + b.
  [[nodiscard]] std::span<const double> encoder_mean() const noexcept { return q_mean_; }

  [[nodiscard]] double log_weight(std::span<const double> noise) const {
    detail::check_dim(noise.size(), d_, "noise");
    const auto th = theta();
    double joint = 0.0;
    double noise_sq = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
      const double z = kNoiseScale * noise[k] + q_mean_[k];
      joint += (z - th[k]) * (z - th[k]) + (z - x_[k]) * (z - x_[k]);
      noise_sq += noise[k] * noise[k];
    }
    return log_const_ - 0.5 * joint + 0.5 * noise_sq;
  }

  /// phi_prime = (a'_1..a'_d, b'_1..b'_d).
  [[nodiscard]] double log_weight(std::span<const double> noise, std::span<const double> phi_prime) const {
    detail::check_dim(noise.size(), d_, "noise");
    detail::check_dim(phi_prime.size(), 2 * d_, "phi'");
    const auto th = theta();
    double joint = 0.0;
    double enc = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
      const double z = kNoiseScale * noise[k] + phi_prime[k] * x_[k] + phi_prime[d_ + k];
      joint += (z - th[k]) * (z - th[k]) + (z - x_[k]) * (z - x_[k]);
      enc += (z - q_mean_[k]) * (z - q_mean_[k]);
    }
    return log_const_ - 0.5 * joint + enc / (2.0 * kEncoderVariance);
  }

  /// Hand-derived partials at phi' = phi, with z = sqrt(2/3) noise + a x + b:
  ///   REP  theta_k: z_k - theta_k
  ///   REP  b_k:     theta_k + x_k - 2 z_k            (a_k: times x_k)
  ///   DREP b_k:     theta_k + x_k - 2 z_k + sqrt(3/2) noise_k   (a_k: times x_k)
  [[nodiscard]] double d_log_weight(std::span<const double> noise, std::size_t psi, GradMode mode) const {
    check_psi(*this, psi, mode);
    const std::size_t k = psi % d_;
    const double z = kNoiseScale * noise[k] + q_mean_[k];
    const auto th = theta();
    if (psi < d_) {
      return z - th[k];
    }
    double grad_b = th[k] + x_[k] - 2.0 * z;
    if (mode == GradMode::drep) {
      grad_b += noise[k] / kNoiseScale;
    }
    return psi < 2 * d_ ? grad_b * x_[k] : grad_b;
  }

 private:
  static constexpr double kNoiseScale = 0.81649658092772603273242802490196379732198249355222;  // sqrt(2/3)

  void refresh() {
    q_mean_.resize(d_);
    const auto av = a();
    const auto bv = b();
    for (std::size_t k = 0; k < d_; ++k) {
      q_mean_[k] = av[k] * x_[k] + bv[k];
    }
    // -d log(2 pi) from p(x, z), + (d/2) log(2 pi * 2/3) from q.
    const auto dd = static_cast<double>(d_);
    log_const_ = -dd * std::log(2.0 * std::numbers::pi) + 0.5 * dd * std::log(2.0 * std::numbers::pi * kEncoderVariance);
  }

  std::size_t d_;
  std::vector<double> x_;
  std::vector<double> params_;
  std::vector<double> q_mean_;
  double log_const_ = 0.0;
};

}  // namespace vriwae

#endif  // VRIWAE_MODELS_LINEAR_GAUSSIAN_HPP
