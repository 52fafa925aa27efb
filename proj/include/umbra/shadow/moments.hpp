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

#include "umbra/core/image.hpp"
#include "umbra/raster/rasterizer.hpp"
#include "umbra/scene/light.hpp"

namespace umbra {

// Filtered first and second depth moments as a two-channel image
// (channel 0: m1, channel 1: m2).
struct MomentMaps {
  Image moments;
  int light = 0;
  FilterKernel kernel;

  int resolution() const { return moments.width(); }
  double m1(int x, int y) const { return moments.at(x, y, 0); }
  double m2(int x, int y) const { return moments.at(x, y, 1); }
};

// Two-channel (f, f * f) image from a depth raster. The square is taken per
// pixel before any smoothing.
Image depth_and_square(const RasterOutput& raster);

// Bilinear footprint of a continuous screen position. Texel (i, j) is
// centered at (i + 0.5, j + 0.5); coordinates outside the map replicate the
// border texels.
struct BilinearCell {
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  double fx = 0.0, fy = 0.0;
  bool border_x = false, border_y = false;  // clamped: no derivative along that axis

  double weight(int corner) const;  // corners: (x0,y0), (x1,y0), (x0,y1), (x1,y1)
  int texel(int corner, int width) const;
};
BilinearCell bilinear_cell(double sx, double sy, int width, int height);

struct MomentSample {
  double m1 = 0.0;
  double m2 = 0.0;
};
MomentSample sample_moments(const Image& moments, const BilinearCell& cell);

// Adjoint of sample_moments: accumulates texel adjoints into moments_bar and
// returns the derivative with respect to (sx, sy).
Vec2 sample_moments_adjoint(const Image& moments, const BilinearCell& cell, double m1_bar, double m2_bar,
                            Image* moments_bar);

}  // namespace umbra
