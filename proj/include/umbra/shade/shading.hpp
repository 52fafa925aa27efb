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

#include "umbra/core/image.hpp"
#include "umbra/scene/scene.hpp"

#include <span>
#include <vector>

namespace umbra {

// Unit direction from a surface point towards a light.
struct LightDirection {
  Vec3 l = Vec3::Zero();
  double scale = 1.0;   // |direction| (directional) or |position - x| (spot)
  bool inside = true;   // spot cone test; always true for directional lights
};

LightDirection light_direction(const LightSource& light, const ProjectionFrame& frame, const Vec3& x);

// Lambertian radiance at one point: albedo * sum_l I_l max(0, n.l) v_l.
// `visibility` is empty (all lit) or holds one value per light.
Vec3 shade_point(const Vec3& x, const Vec3& n, const Vec3& albedo, std::span<const LightSource> lights,
                 std::span<const ProjectionFrame> frames, std::span<const double> visibility);

// Camera-pass attributes per pixel.
struct GeometryBuffer {
  int width = 0;
  int height = 0;
  Image position;  // 3 channels, world units
  Image normal;    // 3 channels, unit where covered, facing the camera
  Image albedo;    // 3 channels
  std::vector<int> tri;

  bool covered(int p) const { return tri[p] >= 0; }
};

GeometryBuffer gbuffer_pass(const Scene& scene, int camera);

// Shades a geometry buffer; `visibility` is empty or one image per light.
// Uncovered pixels get the scene background.
Image shade(const GeometryBuffer& gbuffer, const Scene& scene, const std::vector<Image>& visibility);

// Full forward render of one camera at the scene's current state.
Image render(const Scene& scene, int camera);

}  // namespace umbra
