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

#include "umbra/render/context.hpp"

#include <memory>
#include <span>
#include <vector>

namespace umbra {

// Builds the differentiable render pipeline for a scene:
//   Scatter -> per light: LightFrame, LightProject, ShadowRaster,
//   ShadowAntialias, Moments -> per camera: CameraProject, GBuffer,
//   Visibility (per light), Shade, CameraAntialias -> ImageLoss,
//   NormalConsistency, TotalLoss.
// Shadow stages are omitted when settings.shadows is off.
Pipeline<RenderContext> build_render_pipeline(const Scene& scene);

// Owns a scene, its pipeline and context; the entry point for experiments.
class Renderer {
 public:
  explicit Renderer(Scene scene, std::vector<ViewLoss> losses = {}, RegularizerSpec regularizer = {});

  // Forward pass at `params` (must match the scene's binding table).
  double forward(std::span<const double> params);
  // Forward and backward; returns the loss and fills grad.
  double evaluate(std::span<const double> params, std::vector<double>& grad);

  // Forward pass at the scene's current (gathered) parameters.
  void render();

  std::vector<double> initial_parameters() const { return base_.parameters.gather(base_); }
  const Scene& base_scene() const { return base_; }
  const Scene& current_scene() const { return ctx_.scene; }

  RenderContext& context() { return ctx_; }
  const RenderContext& context() const { return ctx_; }
  const Pipeline<RenderContext>& pipeline() const { return pipeline_; }

  const Image& image(int camera) const { return ctx_.views.at(camera).image; }
  const Image& visibility(int camera, int light) const { return ctx_.views.at(camera).visibility.at(light); }
  const Image& moments(int light) const { return ctx_.lights.at(light).moments; }
  std::vector<Vec3> world_positions(int mesh) const;

  void set_losses(std::vector<ViewLoss> losses);
  void set_reference(int loss_index, Image reference);

 private:
  Scene base_;
  Pipeline<RenderContext> pipeline_;
  RenderContext ctx_;
};

}  // namespace umbra
