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

#include "umbra/experiments/light_estimation.hpp"

#include "umbra/core/rng.hpp"
#include "umbra/render/renderer.hpp"

#include <cmath>
#include <limits>

namespace umbra {

std::vector<int> greedy_match(const std::vector<Vec3>& estimates, const std::vector<Vec3>& targets) {
  if (estimates.size() != targets.size()) throw ConfigError("greedy_match: set sizes differ");
  const int n = static_cast<int>(estimates.size());
  std::vector<int> match(n, -1);
  std::vector<bool> taken(n, false);
  for (int round = 0; round < n; ++round) {
    double best = -std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < n; ++i) {
      if (match[i] >= 0) continue;
      for (int j = 0; j < n; ++j) {
        if (taken[j]) continue;
        const double c = estimates[i].normalized().dot(targets[j].normalized());
        if (c > best) {
          best = c;
          bi = i;
          bj = j;
        }
      }
    }
    match[bi] = bj;
    taken[bj] = true;
  }
  return match;
}

double alignment(const std::vector<Vec3>& estimates, const std::vector<Vec3>& targets) {
  if (estimates.empty()) return 1.0;
  const std::vector<int> match = greedy_match(estimates, targets);
  double sum = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    sum += estimates[i].normalized().dot(targets[match[i]].normalized());
  }
  return sum / static_cast<double>(estimates.size());
}

Vec3 sample_light_direction(Rng& rng, double cone_deg) {
  // Uniform on the spherical cap around -z.
  const double cos_max = std::cos(radians(cone_deg));
  const double c = rng.uniform(cos_max, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  return Vec3(s * std::cos(phi), s * std::sin(phi), -c);
}

LightRun run_light_once(const LightEstimationConfig& config, const std::vector<Vec3>& targets,
                        const std::vector<Vec3>& initial) {
  LightSceneOptions options = config.scene;
  options.directions = targets;
  Scene scene = make_light_scene(options);
  for (int l = 0; l < static_cast<int>(targets.size()); ++l) {
    Binding b;
    b.kind = BindingKind::kLightDirection;
    b.target = l;
    scene.bind(b);
  }
  Renderer renderer(scene);
  renderer.render();
  ViewLoss loss;
  loss.camera = 0;
  loss.reference = renderer.image(0);
  renderer.set_losses({loss});

  std::vector<double> start;
  for (const Vec3& d : initial) start.insert(start.end(), {d.x(), d.y(), d.z()});
  RunOptions run_options;
  run_options.iterations = config.iterations;
  run_options.optimizer = config.optimizer;
  const Trace trace = run_optimization(
      [&](std::span<const double> p, std::vector<double>& g) { return renderer.evaluate(p, g); }, start,
      run_options);

  LightRun run;
  run.targets = targets;
  run.initial = initial;
  for (std::size_t l = 0; l < targets.size(); ++l) {
    run.estimates.emplace_back(trace.final_params[3 * l], trace.final_params[3 * l + 1], trace.final_params[3 * l + 2]);
  }
  run.initial_alignment = alignment(initial, targets);
  run.alignment = alignment(run.estimates, targets);
  run.trace_hash = trace.hash();
  return run;
}

LightSummary run_light_estimation(const LightEstimationConfig& config) {
  LightSummary summary;
  for (int i = 0; i < config.runs; ++i) {
    Rng rng(config.seed * 7919ull + static_cast<std::uint64_t>(i));
    std::vector<Vec3> targets, initial;
    for (int l = 0; l < config.lights; ++l) targets.push_back(sample_light_direction(rng, config.cone_deg));
    for (int l = 0; l < config.lights; ++l) initial.push_back(sample_light_direction(rng, config.cone_deg));
    summary.runs.push_back(run_light_once(config, targets, initial));
    summary.mean_alignment += summary.runs.back().alignment / config.runs;
  }
  return summary;
}

}  // namespace umbra
