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

#ifndef VRIWAE_STATCORE_NORMAL_HPP
#define VRIWAE_STATCORE_NORMAL_HPP

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

/**
 * \file
 * \brief Standard normal density, distribution function, quantile and Mills ratio.
 *
 * The distribution function is evaluated through the complementary error
 * function on the side where it does not cancel, which keeps the absolute
 * error at the ulp level over the whole real line. The Mills ratio switches to
 * its Laplace continued fraction in the far tail, where 1 - Phi(u) underflows.
 */

namespace vriwae {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176398613974736378;

inline double normal_pdf(double u) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

inline double normal_log_pdf(double u) noexcept { return -0.5 * u * u - kLogSqrt2Pi; }

inline double normal_cdf(double u) noexcept { return 0.5 * std::erfc(-u * std::numbers::sqrt2 / 2.0); }

/// 1 - Phi(u) without cancellation.
inline double normal_sf(double u) noexcept { return 0.5 * std::erfc(u * std::numbers::sqrt2 / 2.0); }

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace detail {

// m(u) = 1/(u + 1/(u + 2/(u + 3/(u + ...)))), modified Lentz.
inline double mills_continued_fraction(double u) noexcept {
  constexpr double tiny = 1e-300;
  double f = u;
  double c = u;
  double d = 0.0;
  for (int n = 1; n < 500; ++n) {
    const double a = static_cast<double>(n);
    d = u + a * d;
    if (d == 0.0) d = tiny;
    c = u + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      break;
    }
  }
  return 1.0 / f;
}

}  // namespace detail

/// Mills ratio (1 - Phi(u)) / phi(u) for u > 0.
inline double mills_ratio(double u) {
  if (!(u > 0.0)) {
    throw std::domain_error("mills_ratio: u must be positive");
  }
  if (u < 5.0) {
    return normal_sf(u) / normal_pdf(u);
  }
  return detail::mills_continued_fraction(u);
}

/// log Phi(u), accurate deep in the left tail.
inline double normal_log_cdf(double u) noexcept {
  if (u > -20.0) {
    return std::log(normal_cdf(u));
  }
  return normal_log_pdf(u) + std::log(detail::mills_continued_fraction(-u));
}

}  // namespace vriwae

#endif  // VRIWAE_STATCORE_NORMAL_HPP
