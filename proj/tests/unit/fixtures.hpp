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

#include "umbra/core/rng.hpp"
#include "umbra/experiments/scenes.hpp"
#include "umbra/render/renderer.hpp"
#include "umbra/scene/primitives.hpp"

#include <gtest/gtest.h>

#include <vector>

namespace umbra::testing {

// Minimal-plane scene with the occluder translation (x, y) bound.
inline Scene bound_minimal_plane(MinimalPlaneOptions options = {}) {
  Scene scene = make_minimal_plane_scene(options);
  Binding b;
  b.kind = BindingKind::kTranslation;
  b.target = kMinimalPlaneOccluder;
  b.axes = {0, 1};
  scene.bind(b);
  return scene;
}

// A renderer whose loss compares camera 0 against `reference`.
inline Renderer with_reference(Scene scene, const Image& reference, double weight = 1.0) {
  ViewLoss loss;
  loss.camera = 0;
  loss.reference = reference;
  loss.weight = weight;
  return Renderer(std::move(scene), {loss});
}

inline Image random_image(int w, int h, int c, Rng& rng, double lo = 0.0, double hi = 1.0) {
  Image img(w, h, c);
  for (double& v : img.values()) v = rng.uniform(lo, hi);
  return img;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace umbra::testing
