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

#ifndef VRIWAE_STATCORE_NEG_MOMENT_HPP
#define VRIWAE_STATCORE_NEG_MOMENT_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

/**
 * \file
 * \brief Negative moments of a sample mean from the Laplace transform of one draw.
 *
 * For i.i.d. positive W_1..W_N with Laplace transform L(t) = E exp(-t W),
 *
 *   E[(mean of W_1..W_N)^(-mu)] = Gamma(mu)^(-1) * int_0^inf t^(mu-1) L(t/N)^N dt.
 *
 * The integral is accumulated on [0, 1] and then on dyadic shells [T, 2T].
 * Shell contributions of an integrable power tail shrink geometrically, so the
 * remaining tail is extrapolated from the ratio of the last two shells. The
 * integral is declared divergent when shells stop shrinking for three
 * consecutive doublings once T >= 2^10.
 */

namespace vriwae {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial) : std::runtime_error(what), partial_(partial) {}

  /// Integral accumulated before the budget ran out.
  [[nodiscard]] double partial_estimate() const noexcept { return partial_; }

 private:
  double partial_;
};

struct NegMomentOptions {
  double tail_rel_tol = 1e-10;
  int max_doublings = 400;
  int divergence_streak = 3;
  double divergence_min_t = 1024.0;
};

/// Returns E[(W_bar_N)^(-mu)] or +inf when the integral diverges.
inline double neg_moment_oracle(const std::function<double(double)>& laplace_transform, double mu, int n,
                                const NegMomentOptions& opts = {}) {
  if (!(mu > 0.0)) {
    throw std::domain_error("neg_moment_oracle: mu must be positive");
  }
  if (n < 1) {
    throw std::domain_error("neg_moment_oracle: n must be at least 1");
  }
  const double nn = static_cast<double>(n);
  auto integrand = [&](double t) {
    if (t <= 0.0) {
      return 0.0;
    }
    const double lt = laplace_transform(t / nn);
    if (lt <= 0.0) {
      return 0.0;
    }
    return std::exp((mu - 1.0) * std::log(t) + nn * std::log(lt));
  };
  using Gk = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto segment = [&](double a, double b) { return Gk::integrate(integrand, a, b, 15, 1e-14); };

  double total = segment(0.0, 1.0);
  double prev_shell = std::numeric_limits<double>::quiet_NaN();
  int growth_streak = 0;
  double t = 1.0;
  for (int k = 0; k < opts.max_doublings; ++k) {
    const double shell = segment(t, 2.0 * t);
    total += shell;
    t *= 2.0;
    if (!std::isfinite(total)) {
      return std::numeric_limits<double>::infinity();
    }
    if (shell == 0.0) {
      return total / std::tgamma(mu);
    }
    if (!std::isnan(prev_shell)) {
      const double ratio = shell / prev_shell;
      if (ratio >= 1.0) {
        ++growth_streak;
        if (growth_streak >= opts.divergence_streak && t >= opts.divergence_min_t) {
          return std::numeric_limits<double>::infinity();
        }
      } else {
        growth_streak = 0;
        const double tail = shell * ratio / (1.0 - ratio);
        if (tail < opts.tail_rel_tol * total && shell < opts.tail_rel_tol * total * 1e3) {
          return (total + tail) / std::tgamma(mu);
        }
      }
    }
    prev_shell = shell;
  }
  throw QuadratureError("neg_moment_oracle: quadrature did not converge within the doubling budget",
                        total / std::tgamma(mu));
}

}  // namespace vriwae

#endif  // VRIWAE_STATCORE_NEG_MOMENT_HPP
