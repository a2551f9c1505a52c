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

#ifndef VRIWAE_STATCORE_MOMENTS_HPP
#define VRIWAE_STATCORE_MOMENTS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

namespace vriwae {

/// Streaming central moments up to order four.
/**
 * Single-pass updates follow Welford/Terriberry; `merge` uses Pebay's pairwise
 * formulas so partial accumulators built on different workers can be
 * combined. `m2`, `m3`, `m4` are sums of powered deviations from the mean.
 */
struct MomentAccumulator {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  void push(double x) noexcept {
    const auto n1 = static_cast<double>(count);
    ++count;
    const auto n = static_cast<double>(count);
    const double delta = x - mean;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean += delta_n;
    m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
    m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
    m2 += term1;
  }

  void merge(const MomentAccumulator& other) noexcept {
    if (other.count == 0) {
      return;
    }
    if (count == 0) {
      *this = other;
      return;
    }
    const auto na = static_cast<double>(count);
    const auto nb = static_cast<double>(other.count);
    const double n = na + nb;
    const double delta = other.mean - mean;
    const double delta2 = delta * delta;
    const double new_m2 = m2 + other.m2 + delta2 * na * nb / n;
    const double new_m3 = m3 + other.m3 + delta * delta2 * na * nb * (na - nb) / (n * n) +
                          3.0 * delta * (na * other.m2 - nb * m2) / n;
    const double new_m4 = m4 + other.m4 + delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                          6.0 * delta2 * (na * na * other.m2 + nb * nb * m2) / (n * n) +
                          4.0 * delta * (na * other.m3 - nb * m3) / n;
    mean += delta * nb / n;
    m2 = new_m2;
    m3 = new_m3;
    m4 = new_m4;
    count += other.count;
  }

  /// Unbiased (n - 1) sample variance.
  [[nodiscard]] double variance() const {
    if (count < 2) {
      throw std::invalid_argument("variance requires at least 2 samples");
    }
    return std::max(m2, 0.0) / static_cast<double>(count - 1);
  }

  /// Standard error of the mean.
  [[nodiscard]] double stderr_mean() const { return std::sqrt(variance() / static_cast<double>(count)); }
};

/// Empirical signal-to-noise ratio |E X| / sqrt(V X) with its delta-method standard error.
struct SnrValue {
  double mean = 0.0;
  double variance = 0.0;
  double snr = 0.0;
  std::uint64_t n_replicates = 0;
  double snr_stderr = 0.0;

  /// True when the +inf sentinel is set (zero variance).
  [[nodiscard]] bool unbounded() const noexcept { return std::isinf(snr); }
};

/// Builds an SnrValue from accumulated moments.
/**
 * The standard error uses the first-order delta method on g(m, v) = |m|/sqrt(v)
 * with the sample skewness g1 and kurtosis k:
 *   se^2 = (1 - sign(m) * snr * g1 + snr^2 * (k - 1) / 4) / n.
 * For Gaussian replicates this reduces to (1 + snr^2 / 2) / n.
 */
inline SnrValue snr_from_moments(const MomentAccumulator& acc) {
  if (acc.count < 2) {
    throw std::invalid_argument("snr requires at least 2 samples");
  }
  SnrValue out;
  out.mean = acc.mean;
  out.variance = acc.variance();
  out.n_replicates = acc.count;
  if (out.variance > 0.0) {
    const double sd = std::sqrt(out.variance);
    out.snr = std::abs(out.mean) / sd;
    const auto n = static_cast<double>(acc.count);
    const double pop_var = acc.m2 / n;
    const double skew = (acc.m3 / n) / std::pow(pop_var, 1.5);
    const double kurt = (acc.m4 / n) / (pop_var * pop_var);
    const double sign = out.mean >= 0.0 ? 1.0 : -1.0;
    const double se2 = (1.0 - sign * out.snr * skew + out.snr * out.snr * (kurt - 1.0) / 4.0) / n;
    out.snr_stderr = std::sqrt(std::max(se2, 0.0));
  } else {
    // Constant replicates (including the all-zero DREP draws at the optimum)
    // carry the sentinel.
    out.snr = std::numeric_limits<double>::infinity();
    out.snr_stderr = 0.0;
  }
  return out;
}

inline MomentAccumulator accumulate(std::span<const double> samples) {
  MomentAccumulator acc;
  for (double x : samples) {
    acc.push(x);
  }
  return acc;
}

inline SnrValue snr_of_samples(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("snr requires at least 2 samples");
  }
  return snr_from_moments(accumulate(samples));
}

}  // namespace vriwae

#endif  // VRIWAE_STATCORE_MOMENTS_HPP
