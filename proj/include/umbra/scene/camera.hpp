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

#include "umbra/scene/projection.hpp"

namespace umbra {

struct Camera {
  ProjectionKind kind = ProjectionKind::kPerspective;
  Vec3 eye = Vec3(0, 0, 3);
  Vec3 target = Vec3::Zero();
  Vec3 up = Vec3::UnitY();
  double fov_y = radians(45.0);                  // perspective only
  double half_width = 1.0, half_height = 1.0;   // orthographic only, world units
  double near = 0.1;
  double far = 10.0;
  int width = 256;
  int height = 256;

  void validate() const;
  ProjectionFrame frame() const;
};

}  // namespace umbra
