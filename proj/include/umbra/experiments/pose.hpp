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

#include <cstdint>
#include <vector>

namespace umbra {

struct PoseConfig {
  PoseSceneOptions scene;
  OptimizerConfig optimizer{Method::kAdam, 0.01};
  int iterations = 150;
  int runs = 10;
  std::uint64_t seed = 1;
  // Target poses are drawn uniformly from [-range, range]^2 x [-phi, phi];
  // the optimization starts from the rest pose.
  double translation_range = 0.3;
  double rotation_range_deg = 45.0;
};

struct PoseRun {
  RigidPose2p5D target;
  RigidPose2p5D recovered;
  double rotation_error_deg = 0.0;
  double translation_error = 0.0;
  double seconds_per_iteration = 0.0;
  std::uint64_t trace_hash = 0;
};

struct PoseSummary {
  std::vector<PoseRun> runs;
  double mean_rotation_error_deg = 0.0;
  double mean_translation_error = 0.0;
  double scene_extent = 0.0;  // bounding-sphere diameter
  double mean_seconds_per_iteration = 0.0;
};

// Draws the i-th target pose of a seeded experiment.
RigidPose2p5D sample_pose(std::uint64_t seed, int run, double translation_range, double rotation_range_deg);

PoseRun run_pose_once(const PoseConfig& config, const RigidPose2p5D& target, const RigidPose2p5D& start = {});
PoseSummary run_pose_estimation(const PoseConfig& config);

}  // namespace umbra
