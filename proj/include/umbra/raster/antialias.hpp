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

#include "umbra/core/hash.hpp"
#include "umbra/core/image.hpp"
#include "umbra/raster/rasterizer.hpp"
#include "umbra/raster/topology.hpp"

#include <span>
#include <vector>

namespace umbra {

// One blend across a silhouette edge between horizontally or vertically
// adjacent pixels. `front` is the pixel whose triangle is nearest, `other`
// its neighbor. The edge of triangle `tri` (index k = `edge`) crosses the
// segment between their centers at parameter t (0 at front, 1 at other).
// The pixel nearer the crossing is left alone; the farther one (`target`) is
// pulled towards `source` by w = |t - 0.5|.
struct BlendEvent {
  int front = 0;
  int other = 0;
  int target = 0;
  int source = 0;
  int tri = 0;
  int edge = 0;
  double t = 0.0;
  double w = 0.0;
  bool clamped = false;
};

struct AntialiasPlan {
  int width = 0;
  int height = 0;
  std::vector<BlendEvent> events;  // row-major pixel order, right pair before bottom pair

  void hash_into(Hasher& h) const;
};

// Screen-space facing sign (+1 / -1 / 0) of every face.
std::vector<signed char> facing_signs(std::span<const ScreenPoint> vertices, std::span<const Face> faces);

AntialiasPlan plan_antialias(const RasterOutput& raster, std::span<const ScreenPoint> vertices,
                             std::span<const Face> faces, const EdgeTopology& topology);

// out = in plus every blend, each reading the unblended input.
void apply_antialias(const AntialiasPlan& plan, const Image& in, Image& out);

// Accumulates in_bar (including the identity path) and per-vertex screen
// position adjoints.
void antialias_adjoint(const AntialiasPlan& plan, std::span<const ScreenPoint> vertices,
                       std::span<const Face> faces, const Image& in, const Image& out_bar, Image& in_bar,
                       std::span<ScreenPoint> screen_bar);

}  // namespace umbra
