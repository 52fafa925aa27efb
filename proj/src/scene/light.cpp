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

#include "umbra/scene/light.hpp"

#include <fmt/format.h>

#include <cmath>

namespace umbra {

void FilterKernel::validate() const {
  if (size < 1 || size % 2 == 0) throw ConfigError(fmt::format("kernel size must be odd and >= 1, got {}", size));
}

std::vector<double> FilterKernel::taps() const {
  validate();
  std::vector<double> w(size, 1.0);
  const int r = size / 2;
  if (shape == Shape::kGaussian && size > 1) {
    const double sigma = size / 6.0;
    for (int i = -r; i <= r; ++i) w[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

FilterKernel::Shape parse_kernel_shape(const std::string& name) {
  if (name == "box") return FilterKernel::Shape::kBox;
  if (name == "gaussian") return FilterKernel::Shape::kGaussian;
  throw ConfigError(fmt::format("unknown kernel '{}' (expected box or gaussian)", name));
}

std::string to_string(FilterKernel::Shape shape) {
  return shape == FilterKernel::Shape::kBox ? "box" : "gaussian";
}

void LightSource::validate() const {
  kernel.validate();
  if (!direction.allFinite() || direction.norm() < 1e-12) throw ConfigError("light direction must be nonzero");
  if (shadow_resolution < 1) throw ConfigError("shadow resolution must be positive");
  if ((intensity.array() < 0.0).any()) throw ConfigError("light intensity must be nonnegative");
  if (kind == LightKind::kSpot) {
    if (!(fov > 0.0 && fov < kPi)) throw ConfigError("spot fov must be in (0, pi)");
    if (!(near > 0.0 && near < far)) throw ConfigError("spot light needs 0 < near < far");
  } else if (!(fit.radius > 0.0)) {
    throw ConfigError("directional light needs a positive fit radius");
  }
}

namespace {

struct BasisParts {
  double dir_norm;
  Vec3 f;
  Vec3 c;
  double c_norm;
  Vec3 r;
  Vec3 u;
};

BasisParts make_basis(const LightSource& light) {
  BasisParts b;
  b.dir_norm = light.direction.norm();
  b.f = light.direction / b.dir_norm;
  b.c = b.f.cross(light.up_hint);
  b.c_norm = b.c.norm();
  if (b.c_norm < 1e-9) throw ConfigError("light direction is parallel to its up hint");
  b.r = b.c / b.c_norm;
  b.u = b.r.cross(b.f);
  return b;
}

}  // namespace

ProjectionFrame light_frame(const LightSource& light) {
  const BasisParts b = make_basis(light);
  ProjectionFrame frame;
  frame.basis.forward = b.f;
  frame.basis.right = b.r;
  frame.basis.up = b.u;
  frame.width = frame.height = light.shadow_resolution;
  if (light.kind == LightKind::kDirectional) {
    frame.kind = ProjectionKind::kOrthographic;
    frame.basis.origin = light.fit.center;
    frame.half_width = frame.half_height = light.fit.radius;
    frame.near = -light.fit.radius;
    frame.far = light.fit.radius;
  } else {
    frame.kind = ProjectionKind::kPerspective;
    frame.basis.origin = light.position;
    frame.half_width = frame.half_height = std::tan(0.5 * light.fov);
    frame.near = light.near;
    frame.far = light.far;
  }
  return frame;
}

void light_frame_adjoint(const LightSource& light, const FrameBasis& basis_bar, Vec3& direction_bar,
                         Vec3& position_bar) {
  const BasisParts b = make_basis(light);
  Vec3 f_bar = basis_bar.forward;
  Vec3 r_bar = basis_bar.right;
  // u = r x f
  r_bar += b.f.cross(basis_bar.up);
  f_bar += basis_bar.up.cross(b.r);
  // r = c / |c|
  const Vec3 c_bar = (r_bar - b.r * b.r.dot(r_bar)) / b.c_norm;
  // c = f x up_hint
  f_bar += light.up_hint.cross(c_bar);
  // f = direction / |direction|
  direction_bar += (f_bar - b.f * b.f.dot(f_bar)) / b.dir_norm;
  if (light.kind == LightKind::kSpot) position_bar += basis_bar.origin;
}

}  // namespace umbra
