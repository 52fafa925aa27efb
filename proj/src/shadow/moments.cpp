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

#include "umbra/shadow/moments.hpp"

#include <algorithm>
#include <cmath>

namespace umbra {

Image depth_and_square(const RasterOutput& raster) {
  Image out(raster.width, raster.height, 2);
  for (int p = 0; p < raster.pixel_count(); ++p) {
    const double f = raster.depth[p];
    out(p, 0) = f;
    out(p, 1) = f * f;
  }
  return out;
}

double BilinearCell::weight(int corner) const {
  const double wx = (corner & 1) ? fx : 1.0 - fx;
  const double wy = (corner & 2) ? fy : 1.0 - fy;
  return wx * wy;
}

int BilinearCell::texel(int corner, int width) const {
  return ((corner & 2) ? y1 : y0) * width + ((corner & 1) ? x1 : x0);
}

BilinearCell bilinear_cell(double sx, double sy, int width, int height) {
  BilinearCell c;
  const double u = sx - 0.5, v = sy - 0.5;
  const double fu = std::floor(u), fv = std::floor(v);
  c.fx = u - fu;
  c.fy = v - fv;
  const int x0 = static_cast<int>(fu), y0 = static_cast<int>(fv);
  c.border_x = x0 < 0 || x0 + 1 > width - 1;
  c.border_y = y0 < 0 || y0 + 1 > height - 1;
  c.x0 = std::clamp(x0, 0, width - 1);
  c.x1 = std::clamp(x0 + 1, 0, width - 1);
  c.y0 = std::clamp(y0, 0, height - 1);
  c.y1 = std::clamp(y0 + 1, 0, height - 1);
  return c;
}

MomentSample sample_moments(const Image& m, const BilinearCell& cell) {
  MomentSample s;
  for (int k = 0; k < 4; ++k) {
    const double w = cell.weight(k);
    const int t = cell.texel(k, m.width());
    s.m1 += w * m(t, 0);
    s.m2 += w * m(t, 1);
  }
  return s;
}

Vec2 sample_moments_adjoint(const Image& m, const BilinearCell& cell, double m1_bar, double m2_bar,
                            Image* moments_bar) {
  if (moments_bar != nullptr) {
    for (int k = 0; k < 4; ++k) {
      const double w = cell.weight(k);
      const int t = cell.texel(k, m.width());
      (*moments_bar)(t, 0) += w * m1_bar;
      (*moments_bar)(t, 1) += w * m2_bar;
    }
  }
  const int w = m.width();
  auto val = [&](int corner) {
    const int t = cell.texel(corner, w);
    return m1_bar * m(t, 0) + m2_bar * m(t, 1);
  };
  const double v00 = val(0), v10 = val(1), v01 = val(2), v11 = val(3);
  const double dx = (1.0 - cell.fy) * (v10 - v00) + cell.fy * (v11 - v01);
  const double dy = (1.0 - cell.fx) * (v01 - v00) + cell.fx * (v11 - v10);
  return {dx, dy};
}

}  // namespace umbra
