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

#include "umbra/scene/mesh.hpp"
#include "umbra/scene/projection.hpp"

#include <string>
#include <vector>

namespace umbra {

struct FilterKernel {
  enum class Shape { kBox, kGaussian };
  Shape shape = Shape::kBox;
  int size = 3;

  void validate() const;
  // Normalized 1D taps of the separable kernel, centered; gaussian sigma is
  // size / 6.
  std::vector<double> taps() const;
};

FilterKernel::Shape parse_kernel_shape(const std::string& name);
std::string to_string(FilterKernel::Shape shape);

enum class LightKind { kDirectional, kSpot };

struct LightSource {
  LightKind kind = LightKind::kDirectional;
  // Direction the light travels (directional) or the spot axis. Need not be
  // normalized; frames and shading use direction / |direction|.
  Vec3 direction = -Vec3::UnitZ();
  Vec3 position = Vec3::Zero();  // spot only
  double fov = radians(60.0);    // spot only, full cone angle
  double near = 0.1;             // spot only; directional range comes from `fit`
  double far = 10.0;
  Vec3 intensity = Vec3::Ones();
  int shadow_resolution = 256;
  FilterKernel kernel;
  Vec3 up_hint = Vec3::UnitY();
  // Directional lights: the sphere the orthographic frustum is fitted to. The
  // near plane lies one radius before the center along the light direction.
  Sphere fit;

  void validate() const;
};

// Light-space projection L. Directional: orthographic with half extents and
// depth range given by the fit sphere. Spot: perspective from `position`.
ProjectionFrame light_frame(const LightSource& light);

// Adjoint of the basis construction: maps basis_bar into direction_bar and
// (for spot lights) position_bar.
void light_frame_adjoint(const LightSource& light, const FrameBasis& basis_bar, Vec3& direction_bar,
                         Vec3& position_bar);

}  // namespace umbra
