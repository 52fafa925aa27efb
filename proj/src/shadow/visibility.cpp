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

#include "umbra/shadow/visibility.hpp"

#include <algorithm>
#include <cmath>

namespace umbra {

double chebyshev_visibility(double d, double mu, double var) {
  if (d <= mu) return 1.0;
  const double delta = d - mu;
  return var / (var + delta * delta);
}

double moment_visibility(double d, double m1, double m2, double floor, VisibilityPartials* partials) {
  const double raw_var = m2 - m1 * m1;
  const bool floored = !(raw_var > floor);
  const double var = floored ? floor : raw_var;
  if (partials != nullptr) *partials = {};
  if (d <= m1) return 1.0;
  const double delta = d - m1;
  const double denom = var + delta * delta;
  const double v = var / denom;
  if (partials != nullptr) {
    const double dv_dvar = delta * delta / (denom * denom);
    const double dv_ddelta = -2.0 * var * delta / (denom * denom);
    partials->d = dv_ddelta;
    partials->m1 = -dv_ddelta;
    if (!floored) {
      partials->m1 += dv_dvar * (-2.0 * m1);
      partials->m2 = dv_dvar;
    }
  }
  return v;
}

void VisibilityQuery::hash_into(Hasher& h) const {
  h.add(in_frustum);
  if (!in_frustum) return;
  h.add(d_clamped);
  h.add(cell.x0);
  h.add(cell.y0);
  h.add(cell.border_x);
  h.add(cell.border_y);
  h.add(lit);
  h.add(floored);
}

VisibilityQuery query_visibility(const Vec3& x, const ProjectionFrame& light, const Image& moments, double floor) {
  VisibilityQuery q;
  q.screen = light.project(x);
  q.in_frustum = light.in_footprint(q.screen);
  if (!q.in_frustum) return q;
  q.d_clamped = !(q.screen.d >= 0.0 && q.screen.d <= 1.0);
  q.d = std::clamp(q.screen.d, 0.0, 1.0);
  q.cell = bilinear_cell(q.screen.sx, q.screen.sy, moments.width(), moments.height());
  const MomentSample s = sample_moments(moments, q.cell);
  q.m1 = s.m1;
  q.m2 = s.m2;
  q.lit = q.d <= q.m1;
  q.floored = !(q.m2 - q.m1 * q.m1 > floor);
  q.v = moment_visibility(q.d, q.m1, q.m2, floor, nullptr);
  return q;
}

void visibility_adjoint(const VisibilityQuery& q, const Vec3& x, const ProjectionFrame& light, const Image& moments,
                        double v_bar, double floor, Vec3& x_bar, FrameBasis* basis_bar, Image* moments_bar) {
  if (!q.in_frustum || q.lit || v_bar == 0.0) return;
  VisibilityPartials p;
  moment_visibility(q.d, q.m1, q.m2, floor, &p);
  const double d_bar = q.d_clamped ? 0.0 : v_bar * p.d;
  const Vec2 s_bar = sample_moments_adjoint(moments, q.cell, v_bar * p.m1, v_bar * p.m2, moments_bar);
  const double sx_bar = q.cell.border_x ? 0.0 : s_bar.x();
  const double sy_bar = q.cell.border_y ? 0.0 : s_bar.y();
  light.project_adjoint(x, sx_bar, sy_bar, 0.0, d_bar, x_bar, basis_bar);
}

double classic_visibility(const Vec3& x, const ProjectionFrame& light, const RasterOutput& depth, double bias) {
  const ScreenPoint s = light.project(x);
  if (!light.in_footprint(s)) return 1.0;
  const int tx = std::clamp(static_cast<int>(std::floor(s.sx)), 0, depth.width - 1);
  const int ty = std::clamp(static_cast<int>(std::floor(s.sy)), 0, depth.height - 1);
  const double d = std::clamp(s.d, 0.0, 1.0);
  return d <= depth.depth[ty * depth.width + tx] + bias ? 1.0 : 0.0;
}

double pcf_reference(const Vec3& x, const ProjectionFrame& light, const RasterOutput& depth,
                     std::span<const double> taps) {
  const ScreenPoint s = light.project(x);
  if (!light.in_footprint(s)) return 1.0;
  const double d = std::clamp(s.d, 0.0, 1.0);
  const BilinearCell cell = bilinear_cell(s.sx, s.sy, depth.width, depth.height);
  const int r = static_cast<int>(taps.size()) / 2;
  double v = 0.0;
  for (int k = 0; k < 4; ++k) {
    const int cx = (k & 1) ? cell.x1 : cell.x0;
    const int cy = (k & 2) ? cell.y1 : cell.y0;
    double lit = 0.0;
    for (int j = -r; j <= r; ++j) {
      const int y = std::clamp(cy + j, 0, depth.height - 1);
      for (int i = -r; i <= r; ++i) {
        const int xx = std::clamp(cx + i, 0, depth.width - 1);
        if (d <= depth.depth[y * depth.width + xx]) lit += taps[i + r] * taps[j + r];
      }
    }
    v += cell.weight(k) * lit;
  }
  return v;
}

}  // namespace umbra
