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

#include "umbra/render/renderer.hpp"

#include <vector>

namespace umbra {

// A receiver plane tilted about the x axis, lit obliquely by a directional
// light, with an optional box hovering above it. Without the box every
// covered camera pixel is lit, so any shadowed pixel is acne.
struct AcneSceneOptions {
  int resolution = 128;
  int shadow_resolution = 256;
  FilterKernel kernel{FilterKernel::Shape::kBox, 5};
  double slant_deg = 35.0;
  Vec3 light_direction = Vec3(0.35, -0.5, -1.0);
  bool occluder = true;
};

Scene make_acne_scene(const AcneSceneOptions& options);

// Classic shadow maps without and with bias next to the filtered-moment
// visibility, all for one camera and one light.
struct ShadowComparison {
  Image classic;   // bias 0
  Image biased;    // bias `bias`
  Image variance;  // moment visibility
  Image shaded;
  Image moments;   // (m1, m2) of the light
  int covered = 0;
  // Covered pixels whose visibility is below 0.5.
  int dark_classic = 0;
  int dark_biased = 0;
  int dark_variance = 0;
};

ShadowComparison compare_shadows(const Scene& scene, double bias, int camera = 0, int light = 0);

// Camera pixels in the penumbra (0.02 < v < 0.98) of the minimal-plane
// occluder, one entry per kernel size.
std::vector<int> penumbra_widths(const std::vector<int>& kernel_sizes, int resolution = 128);

// A thin bar (width in world units) over the minimal-plane receiver. Returns
// the fraction of receiver pixels geometrically under the bar whose moment
// visibility stays above 0.9, i.e. where the shadow map missed the bar.
double missed_shadow_fraction(int shadow_resolution, double bar_width = 0.03, int resolution = 128);

}  // namespace umbra
