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

#include "umbra/experiments/scenes.hpp"
#include "umbra/core/rng.hpp"
#include "umbra/optim/run.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace umbra {

// Greedy matching between two equally sized sets of directions: repeatedly
// pairs the unmatched (estimate, target) with the largest cosine. Returns
// match[i] = target index for estimate i.
std::vector<int> greedy_match(const std::vector<Vec3>& estimates, const std::vector<Vec3>& targets);

// (1/n) sum_i normalize(estimate_i) . normalize(target_match(i)).
double alignment(const std::vector<Vec3>& estimates, const std::vector<Vec3>& targets);

struct LightEstimationConfig {
  LightSceneOptions scene = default_scene();
  int lights = 1;
  OptimizerConfig optimizer{Method::kAdam, 0.01};
  int iterations = 200;
  int runs = 20;
  std::uint64_t seed = 1;
  // Light directions are drawn uniformly from a cone around -z.
  double cone_deg = 30.0;

  static LightSceneOptions default_scene() {
    LightSceneOptions o;
    o.kernel.size = 9;
    return o;
  }
};

struct LightRun {
  std::vector<Vec3> targets;
  std::vector<Vec3> initial;
  std::vector<Vec3> estimates;
  double initial_alignment = 0.0;
  double alignment = 0.0;
  std::uint64_t trace_hash = 0;
};

struct LightSummary {
  std::vector<LightRun> runs;
  double mean_alignment = 0.0;
};

Vec3 sample_light_direction(Rng& rng, double cone_deg);

LightRun run_light_once(const LightEstimationConfig& config, const std::vector<Vec3>& targets,
                        const std::vector<Vec3>& initial);
LightSummary run_light_estimation(const LightEstimationConfig& config);

}  // namespace umbra
