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

#include "umbra/scene/projection.hpp"

#include <cmath>

namespace umbra {

FrameBasis FrameBasis::zero() {
  FrameBasis b;
  b.right = b.up = b.forward = Vec3::Zero();
  return b;
}

std::array<double, 12> FrameBasis::pack() const {
  return {origin.x(), origin.y(), origin.z(), right.x(),   right.y(),   right.z(),
          up.x(),     up.y(),     up.z(),     forward.x(), forward.y(), forward.z()};
}

FrameBasis FrameBasis::unpack(std::span<const double, 12> v) {
  FrameBasis b;
  b.origin = Vec3(v[0], v[1], v[2]);
  b.right = Vec3(v[3], v[4], v[5]);
  b.up = Vec3(v[6], v[7], v[8]);
  b.forward = Vec3(v[9], v[10], v[11]);
  return b;
}

ScreenPoint ProjectionFrame::project(const Vec3& x) const {
  const Vec3 v = x - basis.origin;
  const double xv = v.dot(basis.right);
  const double yv = v.dot(basis.up);
  const double z = v.dot(basis.forward);
  ScreenPoint s;
  s.d = (z - near) / (far - near);
  if (kind == ProjectionKind::kOrthographic) {
    s.sx = (xv / half_width + 1.0) * 0.5 * width;
    s.sy = (1.0 - yv / half_height) * 0.5 * height;
    s.q = 1.0;
  } else {
    s.sx = (xv / (z * half_width) + 1.0) * 0.5 * width;
    s.sy = (1.0 - yv / (z * half_height)) * 0.5 * height;
    s.q = 1.0 / z;
  }
  return s;
}

void ProjectionFrame::project_adjoint(const Vec3& x, double sx_bar, double sy_bar, double q_bar,
                                      double d_bar, Vec3& x_bar, FrameBasis* basis_bar) const {
  const Vec3 v = x - basis.origin;
  const double xv = v.dot(basis.right);
  const double yv = v.dot(basis.up);
  const double z = v.dot(basis.forward);
  double xv_bar, yv_bar;
  double z_bar = d_bar / (far - near);
  if (kind == ProjectionKind::kOrthographic) {
    xv_bar = sx_bar * 0.5 * width / half_width;
    yv_bar = -sy_bar * 0.5 * height / half_height;
  } else {
    xv_bar = sx_bar * 0.5 * width / (z * half_width);
    yv_bar = -sy_bar * 0.5 * height / (z * half_height);
    z_bar += -sx_bar * 0.5 * width * xv / (z * z * half_width) +
             sy_bar * 0.5 * height * yv / (z * z * half_height) - q_bar / (z * z);
  }
  const Vec3 v_bar = xv_bar * basis.right + yv_bar * basis.up + z_bar * basis.forward;
  x_bar += v_bar;
  if (basis_bar != nullptr) {
    basis_bar->origin -= v_bar;
    basis_bar->right += xv_bar * v;
    basis_bar->up += yv_bar * v;
    basis_bar->forward += z_bar * v;
  }
}

bool ProjectionFrame::in_footprint(const ScreenPoint& s) const {
  if (kind == ProjectionKind::kPerspective && !(s.q > 0.0)) return false;
  return s.sx >= 0.0 && s.sx <= width && s.sy >= 0.0 && s.sy <= height;
}

FrameBasis look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint) {
  FrameBasis b;
  b.origin = eye;
  b.forward = (target - eye).normalized();
  const Vec3 r = b.forward.cross(up_hint);
  if (r.norm() < 1e-12) throw ConfigError("view direction is parallel to the up vector");
  b.right = r.normalized();
  b.up = b.right.cross(b.forward);
  return b;
}

}  // namespace umbra
