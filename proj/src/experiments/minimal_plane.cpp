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

#include "umbra/experiments/minimal_plane.hpp"

#include "umbra/render/renderer.hpp"

namespace umbra {

MinimalPlaneResult run_minimal_plane(const MinimalPlaneConfig& config) {
  Scene scene = make_minimal_plane_scene(config.scene);
  Binding binding;
  binding.target = kMinimalPlaneOccluder;
  binding.axes = {0, 1};
  if (config.mode == MinimalPlaneConfig::Mode::kTranslation) {
    binding.kind = BindingKind::kTranslation;
  } else {
    binding.kind = BindingKind::kVertices;
    binding.vertices = {0};
  }
  scene.bind(binding);

  ViewLoss loss;
  loss.camera = 0;
  Renderer renderer(scene);
  const std::vector<double> truth = renderer.initial_parameters();
  renderer.forward(truth);
  loss.reference = renderer.image(0);
  renderer.set_losses({loss});

  std::vector<double> start = truth;
  start[0] += config.offset.x();
  start[1] += config.offset.y();

  RunOptions options;
  options.iterations = config.iterations;
  options.optimizer = config.optimizer;
  options.stop_loss = config.stop_loss;
  const Objective objective = [&](std::span<const double> p, std::vector<double>& g) {
    return renderer.evaluate(p, g);
  };

  MinimalPlaneResult result;
  result.initial_error = config.offset.norm();
  result.trace = run_optimization(objective, start, options);
  const std::vector<double>& p = result.trace.final_params;
  result.final_offset = Vec2(p[0] - truth[0], p[1] - truth[1]);
  result.final_error = result.final_offset.norm();
  result.final_loss = renderer.forward(p);
  return result;
}

std::vector<ConvergenceRow> run_convergence_study(const MinimalPlaneConfig& base, const std::vector<int>& kernel_sizes) {
  std::vector<ConvergenceRow> rows;
  for (int k : kernel_sizes) {
    ConvergenceRow row;
    row.kernel_size = k;
    MinimalPlaneConfig c = base;
    c.scene.kernel.size = k;
    c.scene.antialias = true;
    row.smooth = run_minimal_plane(c);
    c.scene.antialias = false;
    row.plain = run_minimal_plane(c);
    rows.push_back(std::move(row));
  }
  return rows;
}

RobustnessConfig default_robustness_config() {
  RobustnessConfig c;
  c.base.optimizer = {Method::kSgd, 0.3};
  c.base.scene.occluder_half = 0.1;
  c.base.scene.shadow_resolution = 256;
  c.base.iterations = 300;
  c.offsets = {0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.7, 0.8};
  return c;
}

std::vector<RobustnessRow> run_robustness(const RobustnessConfig& config) {
  std::vector<RobustnessRow> rows;
  for (int k : config.kernel_sizes) {
    RobustnessRow row;
    row.kernel_size = k;
    for (double offset : config.offsets) {
      MinimalPlaneConfig run = config.base;
      run.scene.kernel.size = k;
      run.offset = Vec2(offset, 0.0);
      const MinimalPlaneResult r = run_minimal_plane(run);
      row.final_errors.push_back(r.final_error);
      if (r.final_error >= config.tolerance) break;
      row.max_offset = offset;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace umbra
