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


#ifndef VRIWAE_ANALYTICS_HPP
#define VRIWAE_ANALYTICS_HPP

#include <vriwae/models/reparam_model.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/**
 * \file
 * \brief Closed-form large-N predictions for the two built-in models.
 *
 * Gaussian model: theta = eps * 1, phi = 0, psi = phi_k.
 * Linear Gaussian model: A x + b = (theta + x) / 2 + eps * 1, psi in {theta_k, b_k}.
 *
 * Everything is assembled as signed logarithms and exponentiated once.
 */

namespace vriwae {

/// Signed number stored as (log |v|, sign). Zero has sign 0.
struct LogScalar {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static LogScalar from_log(double log_abs, int sign = 1) {
    if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) return {};
    return {log_abs, sign > 0 ? 1 : -1};
  }
  static LogScalar of(double v) {
    if (v == 0.0) return {};
    return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
  }

  [[nodiscard]] bool is_zero() const noexcept { return sign == 0; }

  /// Exponentiated value, saturated at +-DBL_MAX.
  [[nodiscard]] double value() const noexcept {
    if (sign == 0) return 0.0;
    constexpr double kMax = std::numeric_limits<double>::max();
    if (log_abs >= std::log(kMax)) return sign * kMax;
    return sign * std::exp(log_abs);
  }
};

inline LogScalar operator*(LogScalar a, LogScalar b) {
  if (a.is_zero() || b.is_zero()) return {};
  return {a.log_abs + b.log_abs, a.sign * b.sign};
}

inline LogScalar operator/(LogScalar a, LogScalar b) {
  if (b.is_zero()) throw std::domain_error("LogScalar division by zero");
  if (a.is_zero()) return {};
  return {a.log_abs - b.log_abs, a.sign * b.sign};
}

inline LogScalar operator-(LogScalar a) { return {a.log_abs, -a.sign}; }

inline LogScalar operator+(LogScalar a, LogScalar b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (b.log_abs > a.log_abs) std::swap(a, b);
  const double r = std::exp(b.log_abs - a.log_abs);
  if (a.sign == b.sign) return {a.log_abs + std::log1p(r), a.sign};
  if (r == 1.0) return {};
  return {a.log_abs + std::log1p(-r), a.sign};
}

inline LogScalar operator-(LogScalar a, LogScalar b) { return a + (-b); }

inline LogScalar sqrt(LogScalar a) {
  if (a.sign < 0) throw std::domain_error("LogScalar sqrt of a negative value");
  if (a.is_zero()) return {};
  return {0.5 * a.log_abs, 1};
}

inline LogScalar abs(LogScalar a) { return a.is_zero() ? a : LogScalar{a.log_abs, 1}; }

enum class PredictionKind {
  vr_bound_grad,
  gamma_sq_grad,
  v_rep,
  v_drep,
  snr_rep_leading,
  snr_drep_leading,
  mean_rep_expansion,
  mean_drep_reference,
};

inline std::string to_string(PredictionKind kind) {
  switch (kind) {
    case PredictionKind::vr_bound_grad: return "vr_bound_grad";
    case PredictionKind::gamma_sq_grad: return "gamma_sq_grad";
    case PredictionKind::v_rep: return "v_rep";
    case PredictionKind::v_drep: return "v_drep";
    case PredictionKind::snr_rep_leading: return "snr_rep_leading";
    case PredictionKind::snr_drep_leading: return "snr_drep_leading";
    case PredictionKind::mean_rep_expansion: return "mean_rep_expansion";
    case PredictionKind::mean_drep_reference: return "mean_drep_reference";
  }
  return "unknown";
}

struct PredictionConfig {
  std::size_t d = 1;
  double eps = 0.0;
  double alpha = 0.0;
  std::size_t N = 1;
  std::size_t M = 1;
  std::string psi;  // e.g. "phi_3"
};

struct AnalyticPrediction {
  PredictionKind kind{};
  double value = 0.0;      // saturated at +-DBL_MAX
  double log_value = 0.0;  // log |value| without saturation; -inf for 0
  int sign = 0;
  std::string formula_id;
  PredictionConfig config;
};

/// Coordinate family of a psi label: "phi_3" -> "phi".
inline std::string_view psi_family(std::string_view label) {
  const auto pos = label.rfind('_');
  return pos == std::string_view::npos ? label : label.substr(0, pos);
}

class PredictionSet {
 public:
  void add(PredictionKind kind, LogScalar v, std::string formula_id, PredictionConfig cfg) {
    items_.push_back({kind, v.value(), v.log_abs, v.sign, std::move(formula_id), std::move(cfg)});
  }

  [[nodiscard]] const std::vector<AnalyticPrediction>& items() const noexcept { return items_; }
  [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }

  /// First prediction of `kind` for coordinate family `family` (empty = any),
  /// optionally restricted to a formula id.
  [[nodiscard]] const AnalyticPrediction* find(PredictionKind kind, std::string_view family = {},
                                               std::string_view formula_id = {}) const {
    for (const auto& p : items_) {
      if (p.kind != kind) continue;
      if (!family.empty() && psi_family(p.config.psi) != family) continue;
      if (!formula_id.empty() && p.formula_id != formula_id) continue;
      return &p;
    }
    return nullptr;
  }

  [[nodiscard]] const AnalyticPrediction& at(PredictionKind kind, std::string_view family = {},
                                             std::string_view formula_id = {}) const {
    const auto* p = find(kind, family, formula_id);
    if (p == nullptr) {
      throw std::out_of_range("no prediction " + to_string(kind) + " for '" + std::string(family) + "' " +
                              std::string(formula_id));
    }
    return *p;
  }

 private:
  std::vector<AnalyticPrediction> items_;
};

namespace detail {

inline void check_prediction_args(std::size_t d, double eps, double alpha, std::size_t n, std::size_t m) {
  if (d == 0) throw std::invalid_argument("d must be positive");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::domain_error("eps must be finite and >= 0");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in [0, 1)");
  if (n == 0 || m == 0) throw std::invalid_argument("N and M must be positive");
}

inline std::string coord_label(const char* family, std::size_t k) { return std::string(family) + "_" + std::to_string(k + 1); }

/// log(e^{4a} - 4 e^{2a} + 4 e^{a} - 1) for a > 0.
inline double log_drep_gauss_poly(double a) {
  if (a < 0.5) {
    // sum_{n >= 2} (4^n - 4 2^n + 4) a^n / n!: the leading terms cancel in closed form.
    double sum = 0.0;
    double p4 = 16.0, p2 = 4.0, fact_term = a * a / 2.0;
    for (int n = 2; n < 60; ++n) {
      const double term = (p4 - 4.0 * p2 + 4.0) * fact_term;
      sum += term;
      if (term < 1e-18 * sum) break;
      p4 *= 4.0;
      p2 *= 2.0;
      fact_term *= a / (n + 1);
    }
    return std::log(sum);
  }
  return 4.0 * a + std::log1p(-4.0 * std::exp(-2.0 * a) + 4.0 * std::exp(-3.0 * a) - std::exp(-4.0 * a));
}

}  // namespace detail

/// E[g_REP] ~ dVR - d[gamma^2] / (2N).
inline double theorem1_expansion(double dvr, double dgamma_sq, std::size_t n) {
  return dvr - dgamma_sq / (2.0 * static_cast<double>(n));
}

/// Gaussian model, psi = phi_k (k zero-based).
inline PredictionSet gaussian_predictions(std::size_t d, double eps, double alpha, std::size_t n, std::size_t m,
                                          std::size_t k = 0) {
  detail::check_prediction_args(d, eps, alpha, n, m);
  if (k >= d) throw std::out_of_range("coordinate index out of range");
  const PredictionConfig cfg{d, eps, alpha, n, m, detail::coord_label("phi", k)};
  const double y = 1.0 - alpha;
  const double a = static_cast<double>(d) * eps * eps;
  const auto E = LogScalar::of(eps);
  const auto sqrt_mn = LogScalar::from_log(0.5 * (std::log(double(n)) + std::log(double(m))));
  const auto inv_n = LogScalar::from_log(-std::log(double(n)));

  PredictionSet out;
  const auto dvr = LogScalar::of(alpha) * E;
  const auto dgamma = -(LogScalar::of(2.0 * y) * E * LogScalar::from_log(y * y * a));
  const auto v_rep = LogScalar::from_log(y * y * a + std::log1p(y * y * eps * eps));
  out.add(PredictionKind::vr_bound_grad, dvr, "gauss_vr_grad", cfg);
  out.add(PredictionKind::gamma_sq_grad, dgamma, "gauss_gamma_sq_grad", cfg);
  out.add(PredictionKind::v_rep, v_rep, "gauss_v_rep", cfg);
  const auto mean = dvr - dgamma * LogScalar::of(0.5) * inv_n;
  out.add(PredictionKind::mean_rep_expansion, mean, "gauss_rep_mean_expansion", cfg);

  const auto sd_rep = sqrt(v_rep);
  if (alpha > 0.0) {
    out.add(PredictionKind::snr_rep_leading, sqrt_mn * dvr / sd_rep, "gauss_rep_snr_leading", cfg);
    out.add(PredictionKind::snr_rep_leading, sqrt_mn * abs(mean) / sd_rep, "gauss_rep_snr_with_1_over_n", cfg);
    out.add(PredictionKind::v_drep, LogScalar{}, "gauss_v_drep_zero", cfg);
  } else {
    out.add(PredictionKind::snr_rep_leading, sqrt_mn * abs(mean) / sd_rep, "gauss_rep_snr_alpha0", cfg);
    if (eps > 0.0) {
      const double log_poly = detail::log_drep_gauss_poly(a);
      out.add(PredictionKind::v_drep, LogScalar::from_log(2.0 * std::log(eps) + 2.0 * a + log_poly), "gauss_v_drep_alpha0",
              cfg);
      out.add(PredictionKind::snr_drep_leading, sqrt_mn / LogScalar::from_log(0.5 * log_poly), "gauss_drep_snr_alpha0",
              cfg);
    } else {
      out.add(PredictionKind::v_drep, LogScalar{}, "gauss_v_drep_alpha0", cfg);
    }
  }
  // Two references for the DREP mean: its large-N limit and the exact N = 1
  // value theta_k - phi_k (sign as produced by the per-sample partial).
  out.add(PredictionKind::mean_drep_reference, dvr, "gauss_drep_mean_large_n", cfg);
  out.add(PredictionKind::mean_drep_reference, E, "gauss_drep_mean_single_sample", cfg);
  return out;
}

/// Linear Gaussian model at the offset A x + b = (theta + x) / 2 + eps * 1.
/**
 * Emits theta_k predictions (needs x_k and theta_k) and b_k predictions.
 * For alpha in (0, 1) the b_k DREP variance is alpha^2 / 4 times the theta_k
 * REP variance, hence the 4 / alpha SNR ratio.
 */
inline PredictionSet lingauss_predictions(std::size_t d, double eps, double alpha, std::size_t n, std::size_t m,
                                          std::size_t k, double x_k, double theta_k) {
  detail::check_prediction_args(d, eps, alpha, n, m);
  if (k >= d) throw std::out_of_range("coordinate index out of range");
  const PredictionConfig cfg_theta{d, eps, alpha, n, m, detail::coord_label("theta", k)};
  const PredictionConfig cfg_b{d, eps, alpha, n, m, detail::coord_label("b", k)};
  const double dd = static_cast<double>(d);
  const double y = 1.0 - alpha;
  const double c = 4.0 - alpha;
  const double f = 5.0 - 2.0 * alpha;
  const double e2 = eps * eps;
  const auto E = LogScalar::of(eps);
  const auto sqrt_mn = LogScalar::from_log(0.5 * (std::log(double(n)) + std::log(double(m))));
  const auto inv_2n = LogScalar::from_log(-std::log(2.0 * double(n)));

  // theta_k REP variance; mu_k = 4 eps, |mu|^2 = 16 d eps^2.
  const double log_v_theta = dd * std::log(c) - 0.5 * dd * std::log(15.0 - 6.0 * alpha) +
                             24.0 * y * y * dd * e2 / (c * f) +
                             std::log(2.0 / f + 144.0 * y * y * e2 / (f * f * c * c));
  const auto v_theta = LogScalar::from_log(log_v_theta);
  const auto sd_theta = sqrt(v_theta);

  const auto dgamma_b = LogScalar::of(48.0 * y) * E *
                        LogScalar::from_log((dd - 1.0) * std::log(c) - 0.5 * dd * std::log(3.0) -
                                            (0.5 * dd + 1.0) * std::log(f) + 24.0 * y * y * dd * e2 / (f * c));
  const auto dgamma_theta = -(LogScalar::of(0.5) * dgamma_b);
  const auto dvr_b = -(LogScalar::of(6.0 * alpha / c) * E);
  const auto dvr_theta = LogScalar::of(0.5 * (x_k - theta_k)) + LogScalar::of(3.0 * alpha / c) * E;

  PredictionSet out;
  const auto mean_theta = dvr_theta - dgamma_theta * inv_2n;
  out.add(PredictionKind::vr_bound_grad, dvr_theta, "lingauss_vr_grad_theta", cfg_theta);
  out.add(PredictionKind::gamma_sq_grad, dgamma_theta, "lingauss_gamma_sq_grad_theta", cfg_theta);
  out.add(PredictionKind::v_rep, v_theta, "lingauss_v_rep_theta", cfg_theta);
  out.add(PredictionKind::mean_rep_expansion, mean_theta, "lingauss_rep_mean_expansion_theta", cfg_theta);
  out.add(PredictionKind::snr_rep_leading, sqrt_mn * abs(dvr_theta) / sd_theta, "lingauss_rep_snr_theta", cfg_theta);

  const auto v_b = LogScalar::of(4.0) * v_theta;
  const auto sd_b = sqrt(v_b);
  const auto mean_b = dvr_b - dgamma_b * inv_2n;
  out.add(PredictionKind::vr_bound_grad, dvr_b, "lingauss_vr_grad_b", cfg_b);
  out.add(PredictionKind::gamma_sq_grad, dgamma_b, "lingauss_gamma_sq_grad_b", cfg_b);
  out.add(PredictionKind::v_rep, v_b, "lingauss_v_rep_b", cfg_b);
  out.add(PredictionKind::mean_rep_expansion, mean_b, "lingauss_rep_mean_expansion_b", cfg_b);
  if (alpha > 0.0) {
    const auto snr_rep = sqrt_mn * abs(dvr_b) / sd_b;
    out.add(PredictionKind::snr_rep_leading, snr_rep, "lingauss_rep_snr_b_leading", cfg_b);
    out.add(PredictionKind::snr_rep_leading, sqrt_mn * abs(mean_b) / sd_b, "lingauss_rep_snr_b_with_1_over_n", cfg_b);
    out.add(PredictionKind::v_drep, LogScalar::of(alpha * alpha / 4.0) * v_theta, "lingauss_v_drep_b", cfg_b);
    out.add(PredictionKind::snr_drep_leading, LogScalar::of(4.0 / alpha) * snr_rep, "lingauss_drep_snr_b_4_over_alpha",
            cfg_b);
  } else {
    out.add(PredictionKind::snr_rep_leading, sqrt_mn * abs(mean_b) / sd_b, "lingauss_rep_snr_b_alpha0", cfg_b);
    if (eps > 0.0) {
      // Variance of the alpha = 0 DREP limit: T1 - T2 + T3 with mu_k = 4 eps.
      const double mu2 = 16.0 * e2;
      const auto t1 = LogScalar::from_log(std::log(0.25) + 2.0 * dd * std::log(4.0 / 3.0) + 0.5 * dd * std::log(3.0 / 7.0) +
                                          36.0 / 7.0 * dd * e2 + std::log(2.0 / 7.0 + 144.0 * e2 / 49.0));
      const double log_h = dd * std::log(4.0) - 0.5 * dd * std::log(15.0) + 1.2 * dd * e2;  // 4^d 15^{-d/2} e^{6 d eps^2 / 5}
      const auto t2 = LogScalar::from_log(1.5 * dd * std::log(4.0 / 3.0) + 0.5 * dd * std::log(0.5) + 3.0 * dd * e2 +
                                          std::log(0.3) + log_h + std::log(mu2));
      const auto t3 = (LogScalar::from_log(std::log(4.0) + log_h) - LogScalar::of(1.0)) *
                      LogScalar::from_log(std::log(9.0 / 100.0) + 2.0 * log_h + std::log(mu2));
      const auto v0 = t1 - t2 + t3;
      out.add(PredictionKind::v_drep, v0, "lingauss_v_drep_b_alpha0", cfg_b);
      const auto num = LogScalar::of(0.5) * abs(dgamma_b);
      out.add(PredictionKind::snr_drep_leading, sqrt_mn * num / sqrt(v0), "lingauss_drep_snr_b_alpha0", cfg_b);
      // Same panel, reference of the alpha > 0 shape evaluated at alpha = 0.
      out.add(PredictionKind::snr_drep_leading, sqrt_mn * abs(mean_b) / sd_b, "lingauss_rep_shape_b_alpha0", cfg_b);
    } else {
      out.add(PredictionKind::v_drep, LogScalar{}, "lingauss_v_drep_b_alpha0", cfg_b);
    }
  }
  return out;
}

/// Moments supplied by the caller for a model without built-in closed forms.
struct ModelMoments {
  double dvr = 0.0;
  double dgamma_sq = 0.0;
  double v_rep = 0.0;
  std::optional<double> v_drep;
};

using MomentCallback = std::function<ModelMoments(const PredictionConfig&)>;

/// Generic large-N predictions from user moments (psi in phi for the DREP entries).
inline PredictionSet predictions_from_moments(const MomentCallback& moments, const PredictionConfig& cfg) {
  detail::check_prediction_args(cfg.d, cfg.eps, cfg.alpha, cfg.N, cfg.M);
  const ModelMoments mm = moments(cfg);
  const double sqrt_mn = std::sqrt(double(cfg.M) * double(cfg.N));
  PredictionSet out;
  out.add(PredictionKind::vr_bound_grad, LogScalar::of(mm.dvr), "user_vr_grad", cfg);
  out.add(PredictionKind::gamma_sq_grad, LogScalar::of(mm.dgamma_sq), "user_gamma_sq_grad", cfg);
  out.add(PredictionKind::v_rep, LogScalar::of(mm.v_rep), "user_v_rep", cfg);
  const double mean = theorem1_expansion(mm.dvr, mm.dgamma_sq, cfg.N);
  out.add(PredictionKind::mean_rep_expansion, LogScalar::of(mean), "user_rep_mean_expansion", cfg);
  if (mm.v_rep > 0.0) {
    out.add(PredictionKind::snr_rep_leading, LogScalar::of(sqrt_mn * std::abs(mean) / std::sqrt(mm.v_rep)),
            "user_rep_snr", cfg);
  }
  if (mm.v_drep) {
    out.add(PredictionKind::v_drep, LogScalar::of(*mm.v_drep), "user_v_drep", cfg);
    if (*mm.v_drep > 0.0) {
      const double num = cfg.alpha > 0.0 ? std::abs(mm.dvr) : 0.5 * std::abs(mm.dgamma_sq);
      out.add(PredictionKind::snr_drep_leading, LogScalar::of(sqrt_mn * num / std::sqrt(*mm.v_drep)), "user_drep_snr",
              cfg);
    }
  }
  return out;
}

}  // namespace vriwae

#endif  // VRIWAE_ANALYTICS_HPP
