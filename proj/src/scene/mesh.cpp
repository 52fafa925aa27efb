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

#include "umbra/scene/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace umbra {

void TriangleMesh::validate() const {
  const int n = vertex_count();
  for (int i = 0; i < n; ++i) {
    if (!positions[i].allFinite()) throw ConfigError(fmt::format("vertex {} is not finite", i));
  }
  for (int f = 0; f < face_count(); ++f) {
    const Face& face = faces[f];
    for (int k = 0; k < 3; ++k) {
      if (face[k] < 0 || face[k] >= n) {
        throw ConfigError(fmt::format("face {} references vertex {} (mesh has {})", f, face[k], n));
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw ConfigError(fmt::format("face {} repeats a vertex index", f));
    }
  }
  if (!albedo.empty() && static_cast<int>(albedo.size()) != n) {
    throw ConfigError(fmt::format("albedo has {} entries for {} vertices", albedo.size(), n));
  }
}

Vec3 TriangleMesh::centroid() const {
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : positions) sum += p;
  return positions.empty() ? sum : Vec3(sum / static_cast<double>(positions.size()));
}

void TriangleMesh::bounds(Vec3& lo, Vec3& hi) const {
  const double inf = std::numeric_limits<double>::infinity();
  lo = Vec3::Constant(inf);
  hi = Vec3::Constant(-inf);
  for (const Vec3& p : positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
}

void normalize_to_unit_cube(TriangleMesh& mesh) {
  if (mesh.positions.empty()) return;
  Vec3 lo, hi;
  mesh.bounds(lo, hi);
  const Vec3 center = 0.5 * (lo + hi);
  const double extent = (hi - lo).maxCoeff();
  const double scale = extent > 0.0 ? 2.0 / extent : 1.0;
  for (Vec3& p : mesh.positions) p = (p - center) * scale;
}

Vec3 face_area_normal(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  return (p1 - p0).cross(p2 - p0);
}

Sphere bounding_sphere(std::span<const Vec3> points) {
  Sphere s;
  if (points.empty()) return s;
  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  s.center = 0.5 * (lo + hi);
  for (const Vec3& p : points) s.radius = std::max(s.radius, (p - s.center).norm());
  return s;
}

}  // namespace umbra
