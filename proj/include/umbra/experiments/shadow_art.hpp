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

#include "umbra/optim/preconditioner.hpp"
#include "umbra/optim/run.hpp"
#include "umbra/render/renderer.hpp"

#include <memory>
#include <string>
#include <vector>

namespace umbra {

// Target silhouettes are given per view as grayscale images in [0,1] (0 is
// shadow). Built-in targets are described by a shape on the receiver plane.
struct TargetShape {
  enum class Kind { kDisk, kSquare, kSelf } kind = Kind::kDisk;
  double size = 0.7;  // disk radius or square half side, world units
};

TargetShape::Kind parse_target_kind(const std::string& name);

struct ShadowArtConfig {
  int views = 1;  // 1: light along -z; 2: adds an orthogonal light along -x
  int resolution = 128;
  int shadow_resolution = 256;
  FilterKernel kernel{FilterKernel::Shape::kBox, 3};
  bool antialias = true;
  int segments = 80;  // uv sphere: 2 * segments * (stacks - 1) triangles
  int stacks = 81;
  double radius = 0.5;
  double lambda = 20.0;
  double normal_weight = 0.2;
  OptimizerConfig optimizer{Method::kAdam, 0.2, 0.9, 0.999, 1e-8, true};
  int iterations = 400;
  std::vector<TargetShape> targets = {TargetShape{}};
  // Replaces the light-aligned orthographic cameras with perspective ones
  // that see the receiver at an angle.
  bool oblique_camera = false;
};

// One receiver, light and camera per view. By default the camera looks along
// the light from between object and receiver, so its image is the
// receiver's visibility. Mesh 0 is the sphere.
Scene make_shadow_art_scene(const ShadowArtConfig& config);

// Rasterizes a target shape in a camera image using the receiver's world
// positions: 0 inside the shape, 1 outside.
Image shape_target(const Scene& scene, int view, const TargetShape& shape);

// IoU of the shadow masks (value < 0.5) of two single- or multi-channel
// images, using channel 0.
double shadow_iou(const Image& a, const Image& b);

// The shadow-art objective with the sphere's vertices as parameters,
// reparameterized as u = (I + lambda L) x. Gradients with respect to u are
// the preconditioned vertex gradients.
class ShadowArtProblem {
 public:
  explicit ShadowArtProblem(const ShadowArtConfig& config);

  int views() const { return views_; }
  int width() const { return width_; }
  int height() const { return height_; }

  std::vector<double> initial_parameters() const { return u0_; }
  double evaluate(std::span<const double> u, std::vector<double>& grad);
  double forward(std::span<const double> u);

  // Replaces the reference of one view; single channel, camera resolution.
  void set_target(int view, const Image& gray);
  Image target(int view) const;
  // Channel 0 of the last rendered camera image of a view.
  Image shadow(int view) const;

  std::vector<Vec3> positions(std::span<const double> u) const;
  TriangleMesh mesh(std::span<const double> u) const;
  const std::vector<Face>& faces() const { return faces_; }
  Renderer& renderer() { return *renderer_; }

 private:
  std::vector<double> to_vertices(std::span<const double> u) const;

  int views_ = 1;
  int width_ = 0;
  int height_ = 0;
  std::vector<Face> faces_;
  std::unique_ptr<Renderer> renderer_;
  std::unique_ptr<LaplacianPreconditioner> precond_;
  std::vector<double> u0_;
  std::vector<double> x_;
  std::vector<double> gx_;
};

struct ShadowArtResult {
  Trace trace;
  std::vector<double> iou;  // per view
  std::vector<double> initial_iou;
  std::vector<Image> shadows;
  std::vector<Image> targets;
  TriangleMesh mesh;
};

ShadowArtResult run_shadow_art(const ShadowArtConfig& config, const RunOptions* overrides = nullptr);

}  // namespace umbra
