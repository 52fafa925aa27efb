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

#include "umbra/render/renderer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace umbra {

struct GradcheckConfig {
  int resolution = 48;
  int shadow_resolution = 48;
  FilterKernel kernel{FilterKernel::Shape::kBox, 5};
  bool antialias = true;
  bool smooth_normals = false;
  int samples = 100;        // accepted samples per stage and end to end
  int max_attempts = 1500;  // per stage
  double h = 1e-3;
  double tolerance = 0.02;
  std::uint64_t seed = 1;
};

// A wall with a free-vertex icosphere and a posed box in front of it, lit by
// a directional light (direction and intensity bound) and a spot light
// (position bound). The loss compares against a render at perturbed
// parameters and includes normal consistency on the sphere.
Renderer make_gradcheck_renderer(const GradcheckConfig& config);

inline constexpr int kGradcheckSpotLight = 1;

struct CheckRow {
  std::string name;
  int accepted = 0;  // samples with a nonzero derivative and unchanged structure
  int trivial = 0;   // both derivatives exactly zero
  int excluded = 0;  // structure changed within +-h
  int failed = 0;    // accepted samples above tolerance
  int refined = 0;   // samples checked with a reduced step (see run_gradcheck)
  double max_rel_error = 0.0;

  bool pass(int required) const { return accepted >= required && failed == 0; }
};

struct GradcheckReport {
  std::vector<CheckRow> stages;
  CheckRow end_to_end;
  bool pass = false;
};

// Stage samples whose central difference at step h disagrees with the
// adjoint are retried at h/10 and h/100 with the same output weights, as long
// as the difference estimate itself keeps moving by more than the tolerance;
// moment texels live on the variance scale, far below 1e-3. End-to-end
// samples always use h.
GradcheckReport run_gradcheck(const GradcheckConfig& config);

// d visibility(p) / d params[index] for every pixel of one camera and light,
// one seeded reverse pass per covered pixel. The renderer must hold a forward
// pass at its current parameters.
Image visibility_gradient_image(Renderer& renderer, int camera, int light, int index);

// Where the gradient image is nonzero relative to the penumbra of the
// visibility image (0.02 < v < 0.98, dilated by `dilate` pixels).
struct BandStats {
  int nonzero = 0;
  int band = 0;
  double nonzero_in_band = 0.0;  // fraction of nonzero pixels inside the band
  double band_covered = 0.0;     // fraction of band pixels with a nonzero gradient
};

BandStats gradient_band_stats(const Image& gradient, const Image& visibility, int dilate = 1,
                              double relative_threshold = 1e-3);

// The minimal-plane occluder translation gradient with and without shadow
// map antialiasing.
struct AntialiasDiagnostic {
  Vec2 with_antialias = Vec2::Zero();
  Vec2 without_antialias = Vec2::Zero();
};

AntialiasDiagnostic antialias_diagnostic(int kernel_size = 5);

}  // namespace umbra
