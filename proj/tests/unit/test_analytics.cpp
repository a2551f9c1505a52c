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


#include <vriwae/analytics.hpp>
#include <vriwae/estimators.hpp>
#include <vriwae/models.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace vriwae;
using Catch::Approx;
using K = PredictionKind;

namespace {

EstimatorConfig make_cfg(std::size_t n, double alpha, std::size_t psi, GradMode mode, std::uint64_t seed) {
  EstimatorConfig cfg;
  cfg.N = n;
  cfg.alpha = alpha;
  cfg.psi = psi;
  cfg.mode = mode;
  cfg.seed = seed;
  return cfg;
}

// d = 1 linear Gaussian model at the offset, with x chosen away from theta.
LinearGaussianModel lingauss_d1(double eps) {
  const double theta = 0.3, x = 1.1;
  return LinearGaussianModel({theta}, {0.5}, {0.5 * theta + eps}, {x});
}

}  // namespace

TEST_CASE("LogScalar arithmetic", "[logscalar]") {
  const auto a = LogScalar::of(3.0), b = LogScalar::of(-5.0);
  CHECK((a + b).value() == Approx(-2.0).epsilon(1e-15));
  CHECK((a - b).value() == Approx(8.0).epsilon(1e-15));
  CHECK((a * b).value() == Approx(-15.0).epsilon(1e-15));
  CHECK((b / a).value() == Approx(-5.0 / 3.0).epsilon(1e-15));
  CHECK((a - a).is_zero());
  CHECK(sqrt(LogScalar::of(9.0)).value() == Approx(3.0).epsilon(1e-15));
  CHECK_THROWS(sqrt(b));
  CHECK_THROWS(a / LogScalar{});
  const auto huge = LogScalar::from_log(5000.0);
  CHECK(huge.value() == std::numeric_limits<double>::max());
  CHECK((huge / LogScalar::from_log(4999.0)).value() == Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK((-huge).value() == -std::numeric_limits<double>::max());
}

TEST_CASE("gaussian predictions at eps = 0", "[gaussian]") {
  const auto p = gaussian_predictions(10, 0.0, 0.5, 64, 1, 0);
  CHECK(p.at(K::v_rep).value == 1.0);
  CHECK(p.at(K::vr_bound_grad).value == 0.0);
  CHECK(p.at(K::gamma_sq_grad).value == 0.0);
  CHECK(p.at(K::snr_rep_leading).value == 0.0);
  CHECK(p.at(K::snr_rep_leading).log_value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("gaussian prediction values", "[gaussian]") {
  // mpmath evaluations of the closed forms
  const auto p15 = gaussian_predictions(10, 0.2, 0.9, 1 << 15, 1, 3);
  CHECK(p15.at(K::snr_rep_leading, "phi", "gauss_rep_snr_leading").value ==
        Approx(32.5118769143846312).epsilon(1e-13));
  CHECK(p15.at(K::snr_rep_leading).config.psi == "phi_4");
  const auto p12 = gaussian_predictions(10, 0.2, 0.9, 1 << 12, 1, 0);
  CHECK(p12.at(K::snr_rep_leading, "phi", "gauss_rep_snr_leading").value ==
        Approx(11.4946843176318697).epsilon(1e-13));
  const auto p1 = gaussian_predictions(1, 0.2, 0.5, 100, 1, 0);
  CHECK(p1.at(K::gamma_sq_grad).value == Approx(-0.2020100334168336115).epsilon(1e-14));
  CHECK(p1.at(K::vr_bound_grad).value == Approx(0.1).epsilon(1e-15));
  CHECK(p1.at(K::mean_rep_expansion).value == Approx(0.1010100501670841681).epsilon(1e-14));
  CHECK(p1.at(K::v_drep).value == 0.0);
  CHECK(p1.find(K::snr_drep_leading) == nullptr);
  const auto p0 = gaussian_predictions(10, 0.2, 0.0, 1 << 10, 1, 0);
  CHECK(p0.at(K::snr_drep_leading).value == Approx(31.7132216558344726).epsilon(1e-12));
  CHECK(p0.at(K::vr_bound_grad).value == 0.0);
}

TEST_CASE("DREP mean references carry both candidates", "[gaussian]") {
  const auto p = gaussian_predictions(100, 2.0, 0.3, 1024, 1, 0);
  CHECK(p.at(K::mean_drep_reference, "phi", "gauss_drep_mean_large_n").value == Approx(0.6));
  CHECK(p.at(K::mean_drep_reference, "phi", "gauss_drep_mean_single_sample").value == Approx(2.0));
}

TEST_CASE("large-N mean expansion", "[expansion]") {
  CHECK(theorem1_expansion(0.5, -2.0, 1000000000) == Approx(0.5).epsilon(1e-8));
  const auto p = gaussian_predictions(1, 0.2, 0.5, 100, 1, 0);
  CHECK(theorem1_expansion(p.at(K::vr_bound_grad).value, p.at(K::gamma_sq_grad).value, 100) ==
        Approx(0.10101005016708417).epsilon(1e-14));
  const auto p0 = gaussian_predictions(3, 0.4, 0.0, 50, 1, 0);
  CHECK(p0.at(K::mean_rep_expansion).value == Approx(-p0.at(K::gamma_sq_grad).value / 100.0).epsilon(1e-14));
}

TEST_CASE("linear gaussian prediction values", "[lingauss]") {
  const auto p = lingauss_predictions(10, 0.2, 0.5, 1 << 15, 1, 2, 0.7, -0.1);
  CHECK(p.at(K::snr_rep_leading, "b", "lingauss_rep_snr_b_leading").value == Approx(18.9894902933450643).epsilon(1e-13));
  CHECK(p.at(K::snr_rep_leading, "b").config.psi == "b_3");
  const auto p12 = lingauss_predictions(10, 0.2, 0.5, 1 << 12, 1, 0, 0.0, 0.0);
  CHECK(p12.at(K::snr_rep_leading, "b", "lingauss_rep_snr_b_leading").value ==
        Approx(6.71379867885020826).epsilon(1e-13));
  const auto p0 = lingauss_predictions(10, 0.2, 0.0, 1 << 12, 1, 0, 0.0, 0.0);
  CHECK(p0.at(K::snr_drep_leading, "b", "lingauss_drep_snr_b_alpha0").value ==
        Approx(21.4940998092384609).epsilon(1e-12));
  CHECK(p0.at(K::v_drep, "b").value == Approx(2.54304384268036895).epsilon(1e-12));
  CHECK(p0.find(K::snr_drep_leading, "b", "lingauss_rep_shape_b_alpha0") != nullptr);
  const auto d1 = lingauss_predictions(1, 0.2, 0.0, 1 << 12, 1, 0, 0.0, 0.0);
  CHECK(d1.at(K::v_drep, "b").value == Approx(0.114263724247323547).epsilon(1e-12));
}

TEST_CASE("DREP to REP SNR ratio is 4 / alpha", "[lingauss]") {
  for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double eps : {0.2, 1.0}) {
      for (std::size_t d : {10u, 100u, 500u}) {
        const auto p = lingauss_predictions(d, eps, alpha, 1 << 12, 1, 0, 0.0, 0.0);
        const auto& rep = p.at(K::snr_rep_leading, "b", "lingauss_rep_snr_b_leading");
        const auto& drep = p.at(K::snr_drep_leading, "b");
        CHECK(drep.log_value - rep.log_value == Approx(std::log(4.0 / alpha)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("linear gaussian predictions at eps = 0", "[lingauss]") {
  const auto p = lingauss_predictions(10, 0.0, 0.5, 1024, 1, 0, 1.0, 0.0);
  CHECK(p.at(K::snr_rep_leading, "b", "lingauss_rep_snr_b_leading").value == 0.0);
  CHECK(p.at(K::vr_bound_grad, "theta").value == Approx(0.5));
}

TEST_CASE("theta_k SNR numerator", "[lingauss]") {
  const double x = 1.4, th = 0.2, eps = 0.3, alpha = 0.6;
  const auto p = lingauss_predictions(2, eps, alpha, 256, 1, 1, x, th);
  CHECK(p.at(K::vr_bound_grad, "theta").value == Approx((x - th) / 2.0 + 3.0 * eps * alpha / (4.0 - alpha)));
  CHECK(p.at(K::gamma_sq_grad, "theta").value == Approx(-0.5 * p.at(K::gamma_sq_grad, "b").value));
  CHECK(p.at(K::v_rep, "b").value == Approx(4.0 * p.at(K::v_rep, "theta").value));
}

TEST_CASE("predictions are finite and reproducible over the experiment grid", "[grid]") {
  std::vector<double> alphas{0.0};
  for (int i = 1; i <= 9; ++i) alphas.push_back(0.1 * i);
  for (double eps : {0.2, 1.0, 2.0}) {
    for (double alpha : alphas) {
      for (std::size_t d : {10u, 100u, 500u}) {
        for (std::size_t n = 2; n <= (1u << 15); n *= 2) {
          const auto g = gaussian_predictions(d, eps, alpha, n, 1, 0);
          const auto g2 = gaussian_predictions(d, eps, alpha, n, 1, 0);
          const auto l = lingauss_predictions(d, eps, alpha, n, 1, 0, 0.5, -0.5);
          REQUIRE(g.size() == g2.size());
          for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(std::isfinite(g.items()[i].value));
            CHECK(g.items()[i].value == g2.items()[i].value);
          }
          for (const auto& item : l.items()) CHECK(std::isfinite(item.value));
        }
      }
    }
  }
}

TEST_CASE("prediction argument checks", "[errors]") {
  CHECK_THROWS_AS(gaussian_predictions(10, 0.2, 1.0, 2, 1, 0), std::domain_error);
  CHECK_THROWS_AS(gaussian_predictions(10, -0.2, 0.5, 2, 1, 0), std::domain_error);
  CHECK_THROWS_AS(gaussian_predictions(0, 0.2, 0.5, 2, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_predictions(10, 0.2, 0.5, 2, 1, 10), std::out_of_range);
  CHECK_THROWS_AS(lingauss_predictions(10, 0.2, 0.5, 0, 1, 0, 0, 0), std::invalid_argument);
  const auto p = gaussian_predictions(10, 0.2, 0.5, 2, 1, 0);
  CHECK_THROWS_AS(p.at(K::snr_drep_leading), std::out_of_range);
}

TEST_CASE("user moment callbacks", "[hook]") {
  const MomentCallback cb = [](const PredictionConfig& cfg) {
    ModelMoments m;
    m.dvr = cfg.alpha;
    m.dgamma_sq = -2.0;
    m.v_rep = 4.0;
    m.v_drep = 1.0;
    return m;
  };
  PredictionConfig cfg{5, 0.1, 0.5, 100, 4, "phi_1"};
  const auto p = predictions_from_moments(cb, cfg);
  CHECK(p.at(K::mean_rep_expansion).value == Approx(0.51));
  CHECK(p.at(K::snr_rep_leading).value == Approx(20.0 * 0.51 / 2.0));
  CHECK(p.at(K::snr_drep_leading).value == Approx(20.0 * 0.5));
  cfg.alpha = 0.0;
  CHECK(predictions_from_moments(cb, cfg).at(K::snr_drep_leading).value == Approx(20.0 * 1.0));
}

TEST_CASE("gaussian REP variance matches N times the replicate variance", "[mc]") {
  for (double alpha : {0.3, 0.7}) {
    const GaussianModel g({0.2}, {0.0});
    const std::size_t n = 1 << 14;
    const auto s = replicate_sweep(g, make_cfg(n, alpha, 1, GradMode::rep, 40), 2000);
    const auto p = gaussian_predictions(1, 0.2, alpha, n, 1, 0);
    CHECK(n * s.variance == Approx(p.at(K::v_rep).value).epsilon(0.10));
  }
}

TEST_CASE("gaussian DREP variance decays faster than 1/N", "[mc]") {
  const GaussianModel g({0.2}, {0.0});
  for (double alpha : {0.3, 0.7}) {
    double prev = 0.0;
    for (std::size_t n = 1 << 10; n <= (1u << 14); n *= 2) {
      const auto s = replicate_sweep(g, make_cfg(n, alpha, 1, GradMode::drep, 41), 2000);
      const double scaled = static_cast<double>(n) * s.variance;
      if (prev > 0.0) CHECK(scaled <= prev / 2.0);
      prev = scaled;
    }
  }
}

TEST_CASE("gaussian alpha = 0 closed forms against Monte Carlo", "[mc]") {
  const GaussianModel g({0.5}, {0.0});
  const auto p64 = gaussian_predictions(1, 0.5, 0.0, 64, 1, 0);
  const auto rep = replicate_sweep(g, make_cfg(64, 0.0, 1, GradMode::rep, 42), 1000000);
  CHECK(rep.snr == Approx(p64.at(K::snr_rep_leading, "phi", "gauss_rep_snr_alpha0").value).epsilon(0.10));
  const std::size_t n = 1024;
  const auto p = gaussian_predictions(1, 0.5, 0.0, n, 1, 0);
  const auto drep = replicate_sweep(g, make_cfg(n, 0.0, 1, GradMode::drep, 43), 4000);
  // At alpha = 0 the DREP mean is O(1/N) and v_drep is the limit of N^3 times the variance.
  const double n3 = std::pow(static_cast<double>(n), 3);
  CHECK(n3 * drep.variance == Approx(p.at(K::v_drep).value).epsilon(0.10));
  CHECK(drep.snr == Approx(p.at(K::snr_drep_leading).value).epsilon(0.10));
}

TEST_CASE("gaussian mean expansion against Monte Carlo", "[mc]") {
  const GaussianModel g({0.2}, {0.0});
  const std::size_t n = 32;
  const auto s = replicate_sweep(g, make_cfg(n, 0.3, 1, GradMode::rep, 44), 200000);
  const auto p = gaussian_predictions(1, 0.2, 0.3, n, 1, 0);
  const double se = std::sqrt(s.variance / 200000.0);
  CHECK(std::abs(s.mean - p.at(K::mean_rep_expansion).value) <= 3.0 * se + 5.0 / (n * n));
}

TEST_CASE("linear gaussian variances against Monte Carlo at d = 1", "[mc]") {
  const double eps = 0.2;
  const auto m = lingauss_d1(eps);
  const std::size_t n = 1 << 12;
  for (double alpha : {0.0, 0.5}) {
    const auto p = lingauss_predictions(1, eps, alpha, n, 1, 0, m.x()[0], m.theta()[0]);
    const auto th = replicate_sweep(m, make_cfg(n, alpha, m.theta_index(0), GradMode::rep, 45), 3000);
    CHECK(n * th.variance == Approx(p.at(K::v_rep, "theta").value).epsilon(0.10));
    CHECK(th.mean == Approx(p.at(K::mean_rep_expansion, "theta").value).margin(3.0 * std::sqrt(th.variance / 3000.0)));
    const auto b = replicate_sweep(m, make_cfg(n, alpha, m.b_index(0), GradMode::rep, 46), 3000);
    CHECK(n * b.variance == Approx(p.at(K::v_rep, "b").value).epsilon(0.10));
    const auto bd = replicate_sweep(m, make_cfg(n, alpha, m.b_index(0), GradMode::drep, 47), 3000);
    const double scale = alpha == 0.0 ? std::pow(static_cast<double>(n), 3) : static_cast<double>(n);
    CHECK(scale * bd.variance == Approx(p.at(K::v_drep, "b").value).epsilon(0.10));
  }
}

TEST_CASE("linear gaussian gamma-squared gradient against Monte Carlo at d = 1", "[mc]") {
  // At alpha = 0 the b_k REP mean is -d[gamma^2]/(2N) + o(1/N).
  const double eps = 0.2;
  const auto m = lingauss_d1(eps);
  const std::size_t n = 16, R = 1000000;
  const auto s = replicate_sweep(m, make_cfg(n, 0.0, m.b_index(0), GradMode::rep, 48), R);
  const auto p = lingauss_predictions(1, eps, 0.0, n, 1, 0, m.x()[0], m.theta()[0]);
  CHECK(std::abs(s.mean - p.at(K::mean_rep_expansion, "b").value) <=
        3.0 * std::sqrt(s.variance / R) + 0.1 * std::abs(p.at(K::mean_rep_expansion, "b").value));
}
