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

#include "umbra/core/types.hpp"

#include <array>
#include <span>

namespace umbra {

enum class ProjectionKind { kOrthographic, kPerspective };

// Orthonormal view basis. Packs to 12 scalars: origin, right, up, forward.
struct FrameBasis {
  Vec3 origin = Vec3::Zero();
  Vec3 right = Vec3::UnitX();
  Vec3 up = Vec3::UnitY();
  Vec3 forward = -Vec3::UnitZ();

  static FrameBasis zero();
  std::array<double, 12> pack() const;
  static FrameBasis unpack(std::span<const double, 12> v);
};

// Screen-space image of a world point. sx, sy are continuous pixel
// coordinates (pixel (i, j) has its center at (i + 0.5, j + 0.5), y grows
// downwards); q is the perspective weight 1/z (1 for orthographic frames); d
// is depth normalized linearly in view-space distance so near -> 0, far -> 1.
struct ScreenPoint {
  double sx = 0.0;
  double sy = 0.0;
  double q = 1.0;
  double d = 0.0;
};
static_assert(sizeof(ScreenPoint) == 4 * sizeof(double));

// Linear projective map shared by cameras and lights. Orthographic frames use
// half_width/half_height in world units; perspective frames use the tangents
// of the half field-of-view angles.
struct ProjectionFrame {
  FrameBasis basis;
  ProjectionKind kind = ProjectionKind::kOrthographic;
  double half_width = 1.0;
  double half_height = 1.0;
  double near = 0.0;
  double far = 1.0;
  int width = 1;
  int height = 1;

  ScreenPoint project(const Vec3& x) const;

  // Accumulates the adjoint of project(x) into x_bar and, when non-null,
  // basis_bar (origin, right, up, forward). q_bar is ignored for orthographic
  // frames where q is constant.
  void project_adjoint(const Vec3& x, double sx_bar, double sy_bar, double q_bar, double d_bar,
                       Vec3& x_bar, FrameBasis* basis_bar) const;

  // Inside the frustum footprint on the image rectangle, and in front of the
  // projection center for perspective frames.
  bool in_footprint(const ScreenPoint& s) const;
};

// Right-handed look-at basis; throws ConfigError when up is parallel to the
// view direction.
FrameBasis look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint);

}  // namespace umbra
