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

#ifndef VRIWAE_MODELS_DATASET_HPP
#define VRIWAE_MODELS_DATASET_HPP

#include <vriwae/models/linear_gaussian.hpp>
#include <vriwae/statcore/format.hpp>
#include <vriwae/statcore/rng.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

/**
 * \file
 * \brief Synthetic data set for the linear Gaussian model and its CSV form.
 *
 * CSV layout (every value printed with 17 significant digits, so loading
 * reproduces the doubles exactly):
 *
 *     # vriwae lingauss dataset v1
 *     # seed=<uint64> d=<d> T=<T>
 *     x_1_1,x_1_2,...,x_1_d
 *     ...
 *     x_T_1,...,x_T_d
 */

namespace vriwae {

struct LinGaussDataset {
  std::uint64_t seed = 0;
  std::size_t d = 0;
  std::size_t T = 0;
  std::vector<double> points;  // row-major T x d

  [[nodiscard]] std::span<const double> point(std::size_t t) const { return {points.data() + t * d, d}; }

  /// Empirical mean of the points, the maximum-likelihood theta.
  [[nodiscard]] std::vector<double> theta_star() const {
    std::vector<double> mean(d, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t k = 0; k < d; ++k) {
        mean[k] += points[t * d + k];
      }
    }
    for (double& v : mean) {
      v /= static_cast<double>(T);
    }
    return mean;
  }

  [[nodiscard]] static constexpr double a_star() noexcept { return 0.5; }

  [[nodiscard]] std::vector<double> b_star() const {
    auto b = theta_star();
    for (double& v : b) {
      v *= 0.5;
    }
    return b;
  }

  friend bool operator==(const LinGaussDataset&, const LinGaussDataset&) = default;
};

/// T points drawn i.i.d. from N(0, 2 I_d).
inline LinGaussDataset generate_dataset(std::uint64_t seed, std::size_t d, std::size_t T = 1024) {
  if (d == 0 || T == 0) {
    throw std::invalid_argument("dataset dimensions must be positive");
  }
  LinGaussDataset ds{seed, d, T, std::vector<double>(d * T)};
  Rng rng = child_stream(seed, 0x64617461ULL);
  NormalSampler normal;
  for (double& v : ds.points) {
    v = std::numbers::sqrt2 * normal(rng);
  }
  return ds;
}

inline void write_dataset_csv(std::ostream& os, const LinGaussDataset& ds) {
  os << "# vriwae lingauss dataset v1\n";
  os << "# seed=" << ds.seed << " d=" << ds.d << " T=" << ds.T << "\n";
  for (std::size_t t = 0; t < ds.T; ++t) {
    for (std::size_t k = 0; k < ds.d; ++k) {
      if (k) os << ',';
      os << format_g17(ds.points[t * ds.d + k]);
    }
    os << '\n';
  }
}

inline LinGaussDataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# vriwae lingauss dataset", 0) != 0) {
    throw std::runtime_error("dataset: missing header line");
  }
  if (!std::getline(is, line)) {
    throw std::runtime_error("dataset: missing seed line");
  }
  LinGaussDataset ds;
  unsigned long long seed = 0;
  std::size_t d = 0;
  std::size_t T = 0;
  if (std::sscanf(line.c_str(), "# seed=%llu d=%zu T=%zu", &seed, &d, &T) != 3 || d == 0 || T == 0) {
    throw std::runtime_error("dataset: malformed seed line '" + line + "'");
  }
  ds.seed = seed;
  ds.d = d;
  ds.T = T;
  ds.points.reserve(d * T);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(row, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size()) {
        throw std::runtime_error("dataset: row " + std::to_string(rows + 1) + ": bad number '" + cell + "'");
      }
      ds.points.push_back(v);
      ++cols;
    }
    if (cols != d) {
      throw std::runtime_error("dataset: row " + std::to_string(rows + 1) + " has " + std::to_string(cols) +
                               " columns, expected " + std::to_string(d));
    }
    ++rows;
  }
  if (rows != T) {
    throw std::runtime_error("dataset: expected " + std::to_string(T) + " rows, found " + std::to_string(rows));
  }
  return ds;
}

inline void save_dataset(const std::string& path, const LinGaussDataset& ds) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dataset_csv(os, ds);
}

inline LinGaussDataset load_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_dataset_csv(is);
}

/// theta = theta* + 2 eps, A = A*, b = b* + 2 eps, so that a x + b = (x + theta) / 2 + eps.
inline LinearGaussianModel lingauss_offset(const LinGaussDataset& ds, std::size_t point_index, double eps) {
  if (point_index >= ds.T) throw std::out_of_range("dataset point index out of range");
  auto theta = ds.theta_star();
  auto b = ds.b_star();
  for (std::size_t k = 0; k < ds.d; ++k) {
    theta[k] += 2.0 * eps;
    b[k] += 2.0 * eps;
  }
  const auto x = ds.point(point_index);
  return LinearGaussianModel(std::move(theta), std::vector<double>(ds.d, LinGaussDataset::a_star()), std::move(b),
                             {x.begin(), x.end()});
}

}  // namespace vriwae

#endif  // VRIWAE_MODELS_DATASET_HPP
