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

#include "umbra/raster/rasterizer.hpp"

#include "umbra/core/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace umbra {

namespace {

constexpr double kMinArea = 1e-10;

}  // namespace

ScreenBarycentrics screen_barycentrics(const std::array<const ScreenPoint*, 3>& s, double px, double py) {
  ScreenBarycentrics r;
  const double ax = s[0]->sx - px, ay = s[0]->sy - py;
  const double bx = s[1]->sx - px, by = s[1]->sy - py;
  const double cx = s[2]->sx - px, cy = s[2]->sy - py;
  r.edge = {cross2(bx, by, cx, cy), cross2(cx, cy, ax, ay), cross2(ax, ay, bx, by)};
  r.area = r.edge[0] + r.edge[1] + r.edge[2];
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    r.lambda[i] = r.edge[i] / r.area;
    r.b[i] = r.lambda[i] * s[i]->q;
    sum += r.b[i];
  }
  for (double& b : r.b) b /= sum;
  return r;
}

void barycentric_adjoint(const std::array<const ScreenPoint*, 3>& s, double px, double py,
                         const std::array<double, 3>& b_bar, std::array<Vec2, 3>& sxy_bar,
                         std::array<double, 3>& q_bar) {
  const ScreenBarycentrics r = screen_barycentrics(s, px, py);
  double sum = 0.0, dot = 0.0;
  for (int i = 0; i < 3; ++i) {
    sum += r.lambda[i] * s[i]->q;
    dot += b_bar[i] * r.b[i];
  }
  std::array<double, 3> lambda_bar;
  double area_bar = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double t_bar = (b_bar[i] - dot) / sum;
    lambda_bar[i] = t_bar * s[i]->q;
    q_bar[i] += t_bar * r.lambda[i];
    area_bar -= lambda_bar[i] * r.lambda[i] / r.area;
  }
  // E_i = cross2(s_j - p, s_k - p) with (i, j, k) cyclic.
  for (int i = 0; i < 3; ++i) {
    const double e_bar = lambda_bar[i] / r.area + area_bar;
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double ax = s[j]->sx - px, ay = s[j]->sy - py;
    const double bx = s[k]->sx - px, by = s[k]->sy - py;
    sxy_bar[j] += e_bar * Vec2(by, -bx);
    sxy_bar[k] += e_bar * Vec2(-ay, ax);
  }
}

RasterOutput rasterize(std::span<const ScreenPoint> vertices, std::span<const Face> faces, int width, int height) {
  RasterOutput out;
  out.width = width;
  out.height = height;
  const int n = width * height;
  out.depth.assign(n, kBackgroundDepth);
  out.tri.assign(n, -1);
  out.bary.assign(n, {0.0, 0.0, 0.0});

  const int tiles_x = (width + kTileSize - 1) / kTileSize;
  const int tiles_y = (height + kTileSize - 1) / kTileSize;
  std::vector<std::vector<int>> bins(static_cast<std::size_t>(tiles_x) * tiles_y);

  struct Box {
    int x0, x1, y0, y1;
  };
  std::vector<Box> boxes(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const ScreenPoint& a = vertices[faces[f][0]];
    const ScreenPoint& b = vertices[faces[f][1]];
    const ScreenPoint& c = vertices[faces[f][2]];
    boxes[f] = {1, 0, 1, 0};
    if (!(a.q > 0.0 && b.q > 0.0 && c.q > 0.0)) continue;
    const double area = cross2(b.sx - a.sx, b.sy - a.sy, c.sx - a.sx, c.sy - a.sy);
    if (!(std::abs(area) > kMinArea)) continue;
    const double lo_x = std::min({a.sx, b.sx, c.sx}), hi_x = std::max({a.sx, b.sx, c.sx});
    const double lo_y = std::min({a.sy, b.sy, c.sy}), hi_y = std::max({a.sy, b.sy, c.sy});
    // Pixel i has its center at i + 0.5.
    const int x0 = std::max(0, static_cast<int>(std::ceil(lo_x - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(hi_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(lo_y - 0.5)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(hi_y - 0.5)));
    if (x0 > x1 || y0 > y1) continue;
    boxes[f] = {x0, x1, y0, y1};
    for (int ty = y0 / kTileSize; ty <= y1 / kTileSize; ++ty) {
      for (int tx = x0 / kTileSize; tx <= x1 / kTileSize; ++tx) {
        bins[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(static_cast<int>(f));
      }
    }
  }

  parallel_for_chunks(tiles_x * tiles_y, [&](int tile) {
    const int tx = tile % tiles_x, ty = tile / tiles_x;
    const int px0 = tx * kTileSize, px1 = std::min(width, px0 + kTileSize) - 1;
    const int py0 = ty * kTileSize, py1 = std::min(height, py0 + kTileSize) - 1;
    for (int f : bins[tile]) {
      const Box& box = boxes[f];
      const std::array<const ScreenPoint*, 3> s = {&vertices[faces[f][0]], &vertices[faces[f][1]],
                                                   &vertices[faces[f][2]]};
      for (int y = std::max(py0, box.y0); y <= std::min(py1, box.y1); ++y) {
        for (int x = std::max(px0, box.x0); x <= std::min(px1, box.x1); ++x) {
          const ScreenBarycentrics r = screen_barycentrics(s, x + 0.5, y + 0.5);
          const double sign = r.area > 0.0 ? 1.0 : -1.0;
          if (sign * r.edge[0] < 0.0 || sign * r.edge[1] < 0.0 || sign * r.edge[2] < 0.0) continue;
          const double d = r.b[0] * s[0]->d + r.b[1] * s[1]->d + r.b[2] * s[2]->d;
          if (!(d >= 0.0 && d <= 1.0)) continue;
          const int p = y * width + x;
          if (out.tri[p] < 0 || d < out.depth[p]) {
            out.depth[p] = d;
            out.tri[p] = f;
            out.bary[p] = r.b;
          }
        }
      }
    }
  });
  return out;
}

}  // namespace umbra
