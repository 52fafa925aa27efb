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

#include "umbra/raster/antialias.hpp"

#include "umbra/core/parallel.hpp"

#include <algorithm>

namespace umbra {

namespace {

struct EdgeEval {
  double e_front;
  double e_other;
};

// Edge function of edge k of face f, positive inside the triangle.
double edge_function(const ScreenPoint& a, const ScreenPoint& b, double sign, double px, double py) {
  return sign * cross2(b.sx - a.sx, b.sy - a.sy, px - a.sx, py - a.sy);
}

double center_x(int p, int width) { return p % width + 0.5; }
double center_y(int p, int width) { return p / width + 0.5; }

bool make_event(const RasterOutput& r, std::span<const ScreenPoint> v, std::span<const Face> faces,
                const EdgeTopology& topo, std::span<const signed char> facing, int p, int q, BlendEvent& ev) {
  const int tp = r.tri[p], tq = r.tri[q];
  if (tp == tq) return false;
  int front, other;
  if (tp < 0) {
    front = q, other = p;
  } else if (tq < 0) {
    front = p, other = q;
  } else if (r.depth[p] < r.depth[q] || (r.depth[p] == r.depth[q] && tp < tq)) {
    front = p, other = q;
  } else {
    front = q, other = p;
  }
  const int tri = r.tri[front];
  const Face& f = faces[tri];
  const double sign = facing[tri] >= 0 ? 1.0 : -1.0;
  const double fx = center_x(front, r.width), fy = center_y(front, r.width);
  const double ox = center_x(other, r.width), oy = center_y(other, r.width);
  int best = -1;
  double best_t = 0.0;
  for (int k = 0; k < 3; ++k) {
    const ScreenPoint& a = v[f[k]];
    const ScreenPoint& b = v[f[(k + 1) % 3]];
    const double eo = edge_function(a, b, sign, ox, oy);
    if (!(eo < 0.0)) continue;
    const double ef = edge_function(a, b, sign, fx, fy);
    const double t = ef / (ef - eo);
    if (best < 0 || t < best_t) {
      best = k;
      best_t = t;
    }
  }
  if (best < 0) return false;
  if (!topo.is_silhouette(topo.face_edge(tri, best), facing)) return false;
  ev.front = front;
  ev.other = other;
  ev.tri = tri;
  ev.edge = best;
  ev.clamped = !(best_t >= 0.0 && best_t <= 1.0);
  ev.t = std::clamp(best_t, 0.0, 1.0);
  if (ev.t >= 0.5) {
    ev.target = other;
    ev.source = front;
    ev.w = ev.t - 0.5;
  } else {
    ev.target = front;
    ev.source = other;
    ev.w = 0.5 - ev.t;
  }
  return true;
}

}  // namespace

void AntialiasPlan::hash_into(Hasher& h) const {
  h.add(static_cast<int>(events.size()));
  for (const BlendEvent& e : events) {
    h.add(e.target);
    h.add(e.source);
    h.add(e.tri);
    h.add(e.edge);
    h.add(e.clamped);
  }
}

std::vector<signed char> facing_signs(std::span<const ScreenPoint> v, std::span<const Face> faces) {
  std::vector<signed char> s(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const ScreenPoint& a = v[faces[i][0]];
    const ScreenPoint& b = v[faces[i][1]];
    const ScreenPoint& c = v[faces[i][2]];
    const double area = cross2(b.sx - a.sx, b.sy - a.sy, c.sx - a.sx, c.sy - a.sy);
    s[i] = area > 0.0 ? 1 : (area < 0.0 ? -1 : 0);
  }
  return s;
}

AntialiasPlan plan_antialias(const RasterOutput& r, std::span<const ScreenPoint> v, std::span<const Face> faces,
                             const EdgeTopology& topo) {
  AntialiasPlan plan;
  plan.width = r.width;
  plan.height = r.height;
  const std::vector<signed char> facing = facing_signs(v, faces);
  constexpr int kRowsPerChunk = 16;
  const int chunks = chunk_count(r.height, kRowsPerChunk);
  std::vector<std::vector<BlendEvent>> parts(chunks);
  parallel_for_chunks(chunks, [&](int c) {
    const auto [y0, y1] = chunk_range(c, r.height, kRowsPerChunk);
    BlendEvent ev;
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < r.width; ++x) {
        const int p = y * r.width + x;
        if (x + 1 < r.width && make_event(r, v, faces, topo, facing, p, p + 1, ev)) parts[c].push_back(ev);
        if (y + 1 < r.height && make_event(r, v, faces, topo, facing, p, p + r.width, ev)) parts[c].push_back(ev);
      }
    }
  });
  for (auto& part : parts) plan.events.insert(plan.events.end(), part.begin(), part.end());
  return plan;
}

void apply_antialias(const AntialiasPlan& plan, const Image& in, Image& out) {
  out = in;
  const int channels = in.channels();
  for (const BlendEvent& e : plan.events) {
    for (int c = 0; c < channels; ++c) out(e.target, c) += e.w * (in(e.source, c) - in(e.target, c));
  }
}

void antialias_adjoint(const AntialiasPlan& plan, std::span<const ScreenPoint> v, std::span<const Face> faces,
                       const Image& in, const Image& out_bar, Image& in_bar, std::span<ScreenPoint> screen_bar) {
  const int channels = in.channels();
  for (std::size_t i = 0; i < in_bar.size(); ++i) in_bar.values()[i] += out_bar.values()[i];
  for (const BlendEvent& e : plan.events) {
    double w_bar = 0.0;
    for (int c = 0; c < channels; ++c) {
      const double g = out_bar(e.target, c);
      w_bar += g * (in(e.source, c) - in(e.target, c));
      in_bar(e.source, c) += e.w * g;
      in_bar(e.target, c) -= e.w * g;
    }
    if (e.clamped || w_bar == 0.0) continue;
    const double t_bar = e.t >= 0.5 ? w_bar : -w_bar;
    const Face& f = faces[e.tri];
    const int ia = f[e.edge], ib = f[(e.edge + 1) % 3];
    const ScreenPoint& a = v[ia];
    const ScreenPoint& b = v[ib];
    const ScreenPoint& c = v[f[(e.edge + 2) % 3]];
    const double sign = cross2(b.sx - a.sx, b.sy - a.sy, c.sx - a.sx, c.sy - a.sy) >= 0.0 ? 1.0 : -1.0;
    const double fx = center_x(e.front, plan.width), fy = center_y(e.front, plan.width);
    const double ox = center_x(e.other, plan.width), oy = center_y(e.other, plan.width);
    const double ef = edge_function(a, b, sign, fx, fy);
    const double eo = edge_function(a, b, sign, ox, oy);
    const double denom = (ef - eo) * (ef - eo);
    const double ef_bar = t_bar * (-eo / denom);
    const double eo_bar = t_bar * (ef / denom);
    for (const auto& [px, py, g] : {std::tuple{fx, fy, ef_bar}, std::tuple{ox, oy, eo_bar}}) {
      const double s = sign * g;
      screen_bar[ia].sx += s * (b.sy - py);
      screen_bar[ia].sy += s * (px - b.sx);
      screen_bar[ib].sx += s * (py - a.sy);
      screen_bar[ib].sy += s * (a.sx - px);
    }
  }
}

}  // namespace umbra
