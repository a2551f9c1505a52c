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

#ifndef VRIWAE_STATCORE_LOG_WEIGHTS_HPP
#define VRIWAE_STATCORE_LOG_WEIGHTS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace vriwae {

/// log(sum(exp(xs))) with a max shift. Entries may be -inf; all -inf gives -inf.
inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) {
    throw std::invalid_argument("empty log-sum-exp");
  }
  const double peak = *std::max_element(xs.begin(), xs.end());
  if (peak == -std::numeric_limits<double>::infinity()) {
    return peak;
  }
  double acc = 0.0;
  for (double x : xs) {
    acc += std::exp(x - peak);
  }
  return peak + std::log(acc);
}

/// Writes softmax(scale * log_ws) into `out` and returns log(sum(exp(scale * log_ws))).
/**
 * This is the hot path of every estimator: the caller owns both buffers, so no
 * allocation happens per replicate. `out` must have the size of `log_ws`.
 */
inline double self_normalize_into(std::span<const double> log_ws, std::span<double> out, double scale = 1.0) {
  if (log_ws.empty()) {
    throw std::invalid_argument("empty log-sum-exp");
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (double x : log_ws) {
    peak = std::max(peak, scale * x);
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < log_ws.size(); ++j) {
    out[j] = std::exp(scale * log_ws[j] - peak);
    acc += out[j];
  }
  const double inv = 1.0 / acc;
  for (std::size_t j = 0; j < log_ws.size(); ++j) {
    out[j] *= inv;
  }
  return peak + std::log(acc);
}

/// Self-normalized importance weights exp(log_w_j - LSE(log_ws)).
inline std::vector<double> self_normalize(std::span<const double> log_ws) {
  std::vector<double> out(log_ws.size());
  self_normalize_into(log_ws, out);
  return out;
}

}  // namespace vriwae

#endif  // VRIWAE_STATCORE_LOG_WEIGHTS_HPP
