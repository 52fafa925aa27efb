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
#include "umbra/optim/run.hpp"

#include <vector>

namespace umbra {

struct MinimalPlaneConfig {
  MinimalPlaneOptions scene;
  // Optimize the occluder translation (x, y) or the (x, y) of one corner.
  enum class Mode { kTranslation, kVertex } mode = Mode::kTranslation;
  Vec2 offset = Vec2(0.03, -0.02);  // initial displacement from the ground truth
  OptimizerConfig optimizer{Method::kAdam, 0.01};
  int iterations = 150;
  double stop_loss = 0.0;  // stops once the loss reaches this value
};

struct MinimalPlaneResult {
  double initial_error = 0.0;
  double final_error = 0.0;
  double final_loss = 0.0;
  Vec2 final_offset = Vec2::Zero();
  Trace trace;
};

// Renders the reference at zero displacement, then optimizes from `offset`.
MinimalPlaneResult run_minimal_plane(const MinimalPlaneConfig& config);

// Final error with and without shadow-map antialiasing for each kernel size,
// all other settings from `base`.
struct ConvergenceRow {
  int kernel_size = 0;
  MinimalPlaneResult smooth;
  MinimalPlaneResult plain;
};

std::vector<ConvergenceRow> run_convergence_study(const MinimalPlaneConfig& base, const std::vector<int>& kernel_sizes);

// Largest initial offset along +x from which SGD converges, for each k. The
// scan over ascending offsets stops at the first failure.
struct RobustnessConfig {
  MinimalPlaneConfig base;
  std::vector<int> kernel_sizes = {1, 3, 9, 15};
  std::vector<double> offsets;  // ascending
  double tolerance = 0.01;
};

struct RobustnessRow {
  int kernel_size = 0;
  double max_offset = 0.0;  // 0 when no offset converges
  std::vector<double> final_errors;  // per offset tried
};

RobustnessConfig default_robustness_config();
std::vector<RobustnessRow> run_robustness(const RobustnessConfig& config);

}  // namespace umbra
