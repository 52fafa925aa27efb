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

#include "umbra/scene/primitives.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace umbra {

TriangleMesh make_plane(const Vec3& center, const Vec3& u_axis, const Vec3& v_axis, double half_u,
                        double half_v, int segments) {
  if (segments < 1) throw ConfigError("plane needs at least one segment");
  TriangleMesh mesh;
  const int n = segments + 1;
  for (int j = 0; j < n; ++j) {
    const double b = -1.0 + 2.0 * j / segments;
    for (int i = 0; i < n; ++i) {
      const double a = -1.0 + 2.0 * i / segments;
      mesh.positions.push_back(center + a * half_u * u_axis + b * half_v * v_axis);
    }
  }
  for (int j = 0; j < segments; ++j) {
    for (int i = 0; i < segments; ++i) {
      const int v00 = j * n + i, v10 = v00 + 1, v01 = v00 + n, v11 = v01 + 1;
      mesh.faces.push_back({v00, v10, v11});
      mesh.faces.push_back({v00, v11, v01});
    }
  }
  return mesh;
}

TriangleMesh make_box(const Vec3& center, const Vec3& h) {
  TriangleMesh mesh;
  for (int k = 0; k < 8; ++k) {
    mesh.positions.push_back(center + Vec3((k & 1) ? h.x() : -h.x(), (k & 2) ? h.y() : -h.y(),
                                           (k & 4) ? h.z() : -h.z()));
  }
  // Quads listed counter-clockwise seen from outside.
  const int quads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  for (const auto& q : quads) {
    mesh.faces.push_back({q[0], q[1], q[2]});
    mesh.faces.push_back({q[0], q[2], q[3]});
  }
  return mesh;
}

TriangleMesh make_uv_sphere(const Vec3& center, double radius, int segments, int stacks) {
  if (segments < 3 || stacks < 2) throw ConfigError("uv sphere needs segments >= 3, stacks >= 2");
  TriangleMesh mesh;
  mesh.positions.push_back(center + Vec3(0, radius, 0));
  for (int j = 1; j < stacks; ++j) {
    const double theta = kPi * j / stacks;
    for (int i = 0; i < segments; ++i) {
      const double phi = 2.0 * kPi * i / segments;
      mesh.positions.push_back(center + radius * Vec3(std::sin(theta) * std::cos(phi), std::cos(theta),
                                                      -std::sin(theta) * std::sin(phi)));
    }
  }
  mesh.positions.push_back(center + Vec3(0, -radius, 0));
  const int south = static_cast<int>(mesh.positions.size()) - 1;
  auto ring = [&](int j, int i) { return 1 + (j - 1) * segments + (i % segments); };
  for (int i = 0; i < segments; ++i) mesh.faces.push_back({0, ring(1, i), ring(1, i + 1)});
  for (int j = 1; j + 1 < stacks; ++j) {
    for (int i = 0; i < segments; ++i) {
      const int a = ring(j, i), b = ring(j, i + 1), c = ring(j + 1, i), d = ring(j + 1, i + 1);
      mesh.faces.push_back({a, c, d});
      mesh.faces.push_back({a, d, b});
    }
  }
  for (int i = 0; i < segments; ++i) {
    mesh.faces.push_back({south, ring(stacks - 1, i + 1), ring(stacks - 1, i)});
  }
  return mesh;
}

TriangleMesh make_icosphere(const Vec3& center, double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> p = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : p) v.normalize();
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      p.push_back((p[a] + p[b]).normalized());
      const int id = static_cast<int>(p.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  TriangleMesh mesh;
  for (const Vec3& v : p) mesh.positions.push_back(center + radius * v);
  mesh.faces = std::move(faces);
  return mesh;
}

TriangleMesh make_prism(const std::vector<Vec2>& polygon_xz, double y0, double y1) {
  const int n = static_cast<int>(polygon_xz.size());
  if (n < 3) throw ConfigError("prism polygon needs at least 3 points");
  TriangleMesh mesh;
  for (const Vec2& q : polygon_xz) mesh.positions.emplace_back(q.x(), y0, q.y());
  for (const Vec2& q : polygon_xz) mesh.positions.emplace_back(q.x(), y1, q.y());
  // Counter-clockwise seen from +y in (x, z) means clockwise in the usual
  // right-handed view from +y, so the top cap uses reversed order.
  for (int i = 1; i + 1 < n; ++i) {
    mesh.faces.push_back({0, i, i + 1});
    mesh.faces.push_back({n, n + i + 1, n + i});
  }
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    mesh.faces.push_back({i, n + i, n + j});
    mesh.faces.push_back({i, n + j, j});
  }
  // Fix orientation so normals point outward regardless of polygon winding.
  const Vec3 c = mesh.centroid();
  for (Face& f : mesh.faces) {
    const Vec3& a = mesh.positions[f[0]];
    const Vec3 nrm = face_area_normal(a, mesh.positions[f[1]], mesh.positions[f[2]]);
    if (nrm.dot(a - c) < 0.0) std::swap(f[1], f[2]);
  }
  return mesh;
}

TriangleMesh make_cylinder(const Vec3& base_center, double radius, double height, int segments) {
  std::vector<Vec2> polygon;
  for (int i = 0; i < segments; ++i) {
    const double phi = 2.0 * kPi * i / segments;
    polygon.emplace_back(radius * std::cos(phi), radius * std::sin(phi));
  }
  TriangleMesh mesh = make_prism(polygon, 0.0, height);
  for (Vec3& p : mesh.positions) p += base_center;
  return mesh;
}

}  // namespace umbra
