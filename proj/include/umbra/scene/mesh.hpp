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

#include <span>
#include <string>
#include <vector>

namespace umbra {

struct TriangleMesh {
  std::vector<Vec3> positions;
  std::vector<Face> faces;
  // Optional per-vertex albedo, either empty or one entry per position.
  std::vector<Vec3> albedo;

  int vertex_count() const { return static_cast<int>(positions.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  // Throws ConfigError on out-of-range or repeated indices, non-finite
  // positions, or an albedo array of the wrong length.
  void validate() const;

  Vec3 centroid() const;
  void bounds(Vec3& lo, Vec3& hi) const;
};

// Uniformly scales and recenters the mesh so its bounding box is centered at
// the origin and its largest extent spans [-1, 1].
void normalize_to_unit_cube(TriangleMesh& mesh);

// Unnormalized face normal (twice the area), (p1 - p0) x (p2 - p0).
Vec3 face_area_normal(const Vec3& p0, const Vec3& p1, const Vec3& p2);

// Smallest sphere around the bounding box of all points.
struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};
Sphere bounding_sphere(std::span<const Vec3> points);

}  // namespace umbra
