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

#include "umbra/experiments/pose.hpp"

#include "umbra/core/rng.hpp"
#include "umbra/render/renderer.hpp"

#include <cmath>

namespace umbra {

RigidPose2p5D sample_pose(std::uint64_t seed, int run, double translation_range, double rotation_range_deg) {
  Rng rng(seed * 1000003ull + static_cast<std::uint64_t>(run));
  RigidPose2p5D p;
  p.tx = rng.uniform(-translation_range, translation_range);
  p.ty = rng.uniform(-translation_range, translation_range);
  p.phi = radians(rng.uniform(-rotation_range_deg, rotation_range_deg));
  return p;
}

namespace {

void set_pose(std::vector<double>& params, const RigidPose2p5D& pose) {
  params = {pose.tx, pose.ty, pose.phi};
}

}  // namespace

PoseRun run_pose_once(const PoseConfig& config, const RigidPose2p5D& target, const RigidPose2p5D& start) {
  Scene scene = make_pose_scene(config.scene);
  Binding binding;
  binding.kind = BindingKind::kPose;
  binding.target = kPoseObject;
  binding.axes = {0, 1, 2};
  scene.bind(binding);

  Renderer renderer(scene);
  std::vector<double> truth;
  set_pose(truth, target);
  renderer.forward(truth);
  ViewLoss loss;
  loss.camera = 0;
  loss.reference = renderer.image(0);
  renderer.set_losses({loss});

  std::vector<double> initial;
  set_pose(initial, start);
  RunOptions options;
  options.iterations = config.iterations;
  options.optimizer = config.optimizer;
  const Trace trace = run_optimization(
      [&](std::span<const double> p, std::vector<double>& g) { return renderer.evaluate(p, g); }, initial, options);

  PoseRun run;
  run.target = target;
  const std::vector<double>& p = trace.final_params;
  run.recovered = {p[0], p[1], p[2]};
  run.rotation_error_deg = degrees(std::abs(p[2] - target.phi));
  run.translation_error = std::hypot(p[0] - target.tx, p[1] - target.ty);
  if (!trace.records.empty()) {
    run.seconds_per_iteration = trace.records.back().seconds / static_cast<double>(trace.records.size());
  }
  run.trace_hash = trace.hash();
  return run;
}

PoseSummary run_pose_estimation(const PoseConfig& config) {
  PoseSummary summary;
  const Scene scene = make_pose_scene(config.scene);
  const std::vector<Vec3> world = scene.world_positions();
  summary.scene_extent = 2.0 * bounding_sphere(world).radius;
  for (int i = 0; i < config.runs; ++i) {
    const RigidPose2p5D target = sample_pose(config.seed, i, config.translation_range, config.rotation_range_deg);
    summary.runs.push_back(run_pose_once(config, target));
  }
  for (const PoseRun& r : summary.runs) {
    summary.mean_rotation_error_deg += r.rotation_error_deg / config.runs;
    summary.mean_translation_error += r.translation_error / config.runs;
    summary.mean_seconds_per_iteration += r.seconds_per_iteration / config.runs;
  }
  return summary;
}

}  // namespace umbra
