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

#include "umbra/scene/camera.hpp"

#include <fmt/format.h>

#include <cmath>

namespace umbra {

void Camera::validate() const {
  if (!(near > 0.0 && near < far)) throw ConfigError(fmt::format("camera needs 0 < near < far, got {} / {}", near, far));
  if (width < 1 || height < 1) throw ConfigError("camera resolution must be at least 1x1");
  if (kind == ProjectionKind::kPerspective && !(fov_y > 0.0 && fov_y < kPi)) {
    throw ConfigError("camera field of view must be in (0, pi)");
  }
  if (kind == ProjectionKind::kOrthographic && !(half_width > 0.0 && half_height > 0.0)) {
    throw ConfigError("orthographic extents must be positive");
  }
}

ProjectionFrame Camera::frame() const {
  ProjectionFrame f;
  f.basis = look_at(eye, target, up);
  f.kind = kind;
  f.near = near;
  f.far = far;
  f.width = width;
  f.height = height;
  if (kind == ProjectionKind::kPerspective) {
    f.half_height = std::tan(0.5 * fov_y);
    f.half_width = f.half_height * width / height;
  } else {
    f.half_width = half_width;
    f.half_height = half_height;
  }
  return f;
}

}  // namespace umbra
