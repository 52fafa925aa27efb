// Copyright 2026 The Umbra Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "umbra/experiments/gradcheck.hpp"
#include "umbra/experiments/light_estimation.hpp"
#include "umbra/experiments/minimal_plane.hpp"
#include "umbra/experiments/pose.hpp"
#include "umbra/experiments/render_compare.hpp"
#include "umbra/experiments/shadow_art.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace umbra {

// Command-line overrides shared by every experiment. Unset fields keep the
// config file's (or the built-in) value.
struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> shadow_resolution;
  std::optional<FilterKernel::Shape> kernel_shape;
  std::optional<int> kernel_size;
  bool no_antialias = false;
  bool no_shadows = false;
};

// Reads a JSON document; throws ConfigError with the path on failure.
nlohmann::json load_json(const std::string& path);

// Each reader starts from the built-in defaults, applies the keys present in
// `j` (unknown keys are a ConfigError) and then the overrides. Key names are
// documented in docs/experiments.md.
OptimizerConfig optimizer_from_json(const nlohmann::json& j, OptimizerConfig base);
FilterKernel kernel_from_json(const nlohmann::json& j, FilterKernel base);

GradcheckConfig gradcheck_config(const nlohmann::json& j, const CommonOverrides& o);
MinimalPlaneConfig minimal_plane_config(const nlohmann::json& j, const CommonOverrides& o);
RobustnessConfig robustness_config(const nlohmann::json& j, const CommonOverrides& o);
PoseConfig pose_config(const nlohmann::json& j, const CommonOverrides& o);
LightEstimationConfig light_estimation_config(const nlohmann::json& j, const CommonOverrides& o);
ShadowArtConfig shadow_art_config(const nlohmann::json& j, const CommonOverrides& o);
AcneSceneOptions acne_config(const nlohmann::json& j, const CommonOverrides& o);

}  // namespace umbra
