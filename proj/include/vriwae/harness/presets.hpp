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


#ifndef VRIWAE_HARNESS_PRESETS_HPP
#define VRIWAE_HARNESS_PRESETS_HPP

#include <vriwae/harness/config.hpp>

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

/**
 * \file
 * \brief Figure presets.
 *
 * | preset  | model    | psi   | mode      | eps         | alpha            | target |
 * |---------|----------|-------|-----------|-------------|------------------|--------|
 * | fig1    | gaussian | phi   | rep       | 0.2, 1, 2   | 0.1 .. 0.9       | snr    |
 * | fig2    | gaussian | phi   | drep      | 2           | 0.1 .. 0.9       | mean   |
 * | fig3    | lingauss | b     | rep       | 0.2, 1      | 0.1 .. 0.9       | snr    |
 * | fig4    | lingauss | b     | drep      | 0.2, 1      | 0.1 .. 0.9       | snr    |
 * | fig5    | lingauss | b     | rep, drep | 0.2         | 0                | snr    |
 * | figApp1 | gaussian | phi   | rep, drep | 0.2         | 0                | snr    |
 * | figApp2 | lingauss | theta | rep       | 0.2, 1      | 0, 0.1 .. 0.9    | snr    |
 * | figApp3 | lingauss | b     | rep, drep | 0.2         | 0                | snr    |
 *
 * All use d in {10, 100, 500}, M = 1 and a seeded random coordinate. Full scale:
 * R = 2000, N = 2^1 .. 2^15. Desk scale: R = 200, N = 2^1 .. 2^12.
 */

namespace vriwae::harness {

enum class Scale { desk, full };

inline constexpr std::array<std::string_view, 8> kPresetNames{"fig1", "fig2", "fig3", "fig4",
                                                             "fig5", "figApp1", "figApp2", "figApp3"};

inline constexpr std::uint64_t kDefaultPresetSeed = 20230;

inline Scale parse_scale(const std::string& s) {
  if (s == "desk") return Scale::desk;
  if (s == "full") return Scale::full;
  throw ConfigError("scale", "unknown scale '" + s + "' (desk|full)");
}

/// Field replacements applied after the preset and scale.
struct PresetOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> max_n;  // drop N entries above this
  std::optional<std::vector<std::size_t>> d;
  std::optional<std::vector<double>> alpha;
  std::optional<std::vector<double>> eps;
  std::optional<std::string> output;
};

inline SweepConfig preset_config(std::string_view name, Scale scale = Scale::desk, const PresetOverrides& ov = {}) {
  SweepConfig c;
  c.name = std::string(name);
  c.d = {10, 100, 500};
  c.M = 1;
  c.output = "results";
  c.seed = kDefaultPresetSeed;
  const std::vector<double> alphas{0.1, 0.3, 0.5, 0.7, 0.9};
  if (name == "fig1") {
    c.model = ModelKind::gaussian;
    c.psi = "phi";
    c.eps = {0.2, 1.0, 2.0};
    c.alpha = alphas;
    c.modes = {GradMode::rep};
  } else if (name == "fig2") {
    c.model = ModelKind::gaussian;
    c.psi = "phi";
    c.eps = {2.0};
    c.alpha = alphas;
    c.modes = {GradMode::drep};
    c.target = Target::mean;
  } else if (name == "fig3" || name == "fig4") {
    c.model = ModelKind::lingauss;
    c.psi = "b";
    c.eps = {0.2, 1.0};
    c.alpha = alphas;
    c.modes = {name == "fig3" ? GradMode::rep : GradMode::drep};
  } else if (name == "fig5" || name == "figApp3") {
    c.model = ModelKind::lingauss;
    c.psi = "b";
    c.eps = {0.2};
    c.alpha = {0.0};
    c.modes = {GradMode::rep, GradMode::drep};
  } else if (name == "figApp1") {
    c.model = ModelKind::gaussian;
    c.psi = "phi";
    c.eps = {0.2};
    c.alpha = {0.0};
    c.modes = {GradMode::rep, GradMode::drep};
  } else if (name == "figApp2") {
    c.model = ModelKind::lingauss;
    c.psi = "theta";
    c.eps = {0.2, 1.0};
    c.alpha = {0.0, 0.1, 0.3, 0.5, 0.7, 0.9};
    c.modes = {GradMode::rep};
  } else {
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
  }
  const int max_log2 = scale == Scale::full ? 15 : 12;
  c.replicates = scale == Scale::full ? 2000 : 200;
  for (int j = 1; j <= max_log2; ++j) c.N.push_back(std::size_t{1} << j);

  if (ov.seed) c.seed = *ov.seed;
  if (ov.replicates) c.replicates = *ov.replicates;
  if (ov.max_n) {
    std::erase_if(c.N, [&](std::size_t n) { return n > *ov.max_n; });
    if (c.N.empty()) throw ConfigError("max_n", "removes every N of the preset");
  }
  if (ov.d) c.d = *ov.d;
  if (ov.alpha) c.alpha = *ov.alpha;
  if (ov.eps) c.eps = *ov.eps;
  if (ov.output) c.output = *ov.output;
  c.validate();
  return c;
}

}  // namespace vriwae::harness

#endif  // VRIWAE_HARNESS_PRESETS_HPP
