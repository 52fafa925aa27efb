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
#include "umbra/scene/projection.hpp"

#include <array>
#include <span>
#include <vector>

namespace umbra {

inline constexpr int kTileSize = 16;
inline constexpr double kBackgroundDepth = 1.0;

// Point-sampled coverage at pixel centers with a z-buffer.
struct RasterOutput {
  int width = 0;
  int height = 0;
  std::vector<double> depth;                // normalized depth, 1.0 where uncovered
  std::vector<int> tri;                     // covering triangle, -1 where uncovered
  std::vector<std::array<double, 3>> bary;  // perspective-correct barycentrics

  bool covered(int p) const { return tri[p] >= 0; }
  int pixel_count() const { return width * height; }
};

// Rasterizes faces over projected vertices. Triangles with near-zero screen
// area or a vertex behind the projection center are skipped; fragments with
// depth outside [0, 1] are discarded. Equal depths keep the lower triangle id.
RasterOutput rasterize(std::span<const ScreenPoint> vertices, std::span<const Face> faces, int width, int height);

inline double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Linear (screen-space) barycentrics of point (px, py) and the triangle's
// doubled signed area; lambda sums to one.
struct ScreenBarycentrics {
  std::array<double, 3> lambda;
  std::array<double, 3> edge;  // unnormalized edge functions E_i
  double area;
  std::array<double, 3> b;     // perspective-correct
};
ScreenBarycentrics screen_barycentrics(const std::array<const ScreenPoint*, 3>& s, double px, double py);

// Adjoint of the perspective-correct barycentrics b(s0, s1, s2, q) at pixel
// point (px, py). Accumulates into per-vertex (sx, sy) and q adjoints.
void barycentric_adjoint(const std::array<const ScreenPoint*, 3>& s, double px, double py,
                         const std::array<double, 3>& b_bar, std::array<Vec2, 3>& sxy_bar,
                         std::array<double, 3>& q_bar);

}  // namespace umbra
