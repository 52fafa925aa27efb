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
#include "umbra/raster/rasterizer.hpp"
#include "umbra/scene/projection.hpp"
#include "umbra/shadow/moments.hpp"

namespace umbra {

inline constexpr double kVarianceFloor = 1e-6;

// Upper bound on the probability that the shadow-map depth is at least d,
// given mean mu and variance var: 1 when d <= mu, var / (var + (d - mu)^2)
// otherwise.
double chebyshev_visibility(double d, double mu, double var);

struct VisibilityPartials {
  double d = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

// v(d, m1, m2) with var = max(m2 - m1^2, floor); partials set when non-null.
double moment_visibility(double d, double m1, double m2, double floor, VisibilityPartials* partials);

// Everything a visibility query decided discretely, for structure checks.
struct VisibilityQuery {
  ScreenPoint screen;
  bool in_frustum = false;
  bool d_clamped = false;
  BilinearCell cell;
  double d = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  bool lit = true;      // d <= mu
  bool floored = false;  // variance floor active
  double v = 1.0;

  void hash_into(Hasher& h) const;
};

// Light-space lookup of world point x against filtered moments. Points
// outside the light's footprint are lit.
VisibilityQuery query_visibility(const Vec3& x, const ProjectionFrame& light, const Image& moments,
                                 double floor = kVarianceFloor);

// Accumulates the adjoint of query.v into x_bar, the light basis and the
// moment texels.
void visibility_adjoint(const VisibilityQuery& query, const Vec3& x, const ProjectionFrame& light,
                        const Image& moments, double v_bar, double floor, Vec3& x_bar, FrameBasis* basis_bar,
                        Image* moments_bar);

// Binary shadow test with bias against a depth image (nearest texel).
double classic_visibility(const Vec3& x, const ProjectionFrame& light, const RasterOutput& depth, double bias);

// Brute-force percentage-closer filtering over the same support the moment
// lookup sees: the bilinear blend of the kernel windows around the four
// neighboring texels, on the raw depth map.
double pcf_reference(const Vec3& x, const ProjectionFrame& light, const RasterOutput& depth,
                     std::span<const double> taps);

}  // namespace umbra
