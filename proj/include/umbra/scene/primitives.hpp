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

#include <vector>

namespace umbra {

// Rectangle spanned by center +- half_u * u_axis +- half_v * v_axis, split
// into a grid of (segments x segments) quads. Front normal is u_axis x v_axis.
TriangleMesh make_plane(const Vec3& center, const Vec3& u_axis, const Vec3& v_axis, double half_u,
                        double half_v, int segments = 1);

// Axis-aligned box, outward normals.
TriangleMesh make_box(const Vec3& center, const Vec3& half_extent);

// Latitude/longitude sphere. Triangle count is 2 * segments * (stacks - 1).
TriangleMesh make_uv_sphere(const Vec3& center, double radius, int segments, int stacks);

// Subdivided icosahedron, 20 * 4^subdivisions faces.
TriangleMesh make_icosphere(const Vec3& center, double radius, int subdivisions);

// Polygon in the xz-plane (counter-clockwise seen from +y) extruded along y
// from y0 to y1, with fan-triangulated caps. The polygon must be convex.
TriangleMesh make_prism(const std::vector<Vec2>& polygon_xz, double y0, double y1);

// Closed cylinder along the y axis.
TriangleMesh make_cylinder(const Vec3& base_center, double radius, double height, int segments);

}  // namespace umbra
