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

#include "umbra/autodiff/pipeline.hpp"
#include "umbra/core/image.hpp"
#include "umbra/raster/antialias.hpp"
#include "umbra/raster/rasterizer.hpp"
#include "umbra/raster/topology.hpp"
#include "umbra/scene/scene.hpp"
#include "umbra/shadow/visibility.hpp"

#include <array>
#include <span>
#include <vector>

namespace umbra {

// Per-light buffers of the shadow pass.
struct LightPass {
  std::array<double, 12> frame{};
  std::array<double, 12> frame_bar{};
  ProjectionFrame projection;
  std::vector<double> taps;
  std::vector<ScreenPoint> screen, screen_bar;
  RasterOutput raster;
  Image depth, depth_bar;      // (f, f^2)
  AntialiasPlan plan;
  Image smooth, smooth_bar;    // antialiased (f, f^2)
  Image moments, moments_bar;  // filtered (m1, m2)
};

// Per-camera buffers of the deferred pass.
struct ViewPass {
  ProjectionFrame projection;
  std::vector<ScreenPoint> screen, screen_bar;
  RasterOutput raster;
  Image position, position_bar;
  Image normal, normal_bar;
  Image albedo, albedo_bar;
  std::vector<signed char> flip;
  std::vector<Image> visibility, visibility_bar;  // per light
  std::vector<std::vector<VisibilityQuery>> queries;
  Image shaded, shaded_bar;
  AntialiasPlan plan;
  Image image, image_bar;
};

// Image-space loss term on one camera: weight * mean over unmasked pixels
// and channels of (image - reference)^2. The mask is single-channel; pixels
// with a zero mask value are excluded. An empty mask includes every pixel.
struct ViewLoss {
  int camera = 0;
  Image reference;
  Image mask;
  double weight = 1.0;
};

struct RegularizerSpec {
  int mesh = -1;  // mesh instance for normal consistency, -1 disables it
  double weight = 0.0;
};

struct LightAdjoint {
  Vec3 direction = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  Vec3 intensity = Vec3::Zero();
};

struct RenderContext : ContextBase {
  Scene scene;  // working copy; the parameter scatter writes into it
  WorldLayout layout;
  EdgeTopology topology;
  std::vector<Vec3> world, world_bar;
  std::vector<LightAdjoint> light_bar;
  std::vector<LightPass> lights;
  std::vector<ViewPass> views;
  std::vector<ViewLoss> losses;
  RegularizerSpec regularizer;
  std::vector<std::array<int, 2>> regularizer_edges;  // face pairs of interior edges
  double image_loss = 0.0, image_loss_bar = 0.0;
  double regularizer_loss = 0.0, regularizer_loss_bar = 0.0;
};

inline std::span<double> doubles(std::vector<Vec3>& v) {
  return {reinterpret_cast<double*>(v.data()), v.size() * 3};
}
inline std::span<double> doubles(std::vector<ScreenPoint>& v) {
  return {reinterpret_cast<double*>(v.data()), v.size() * 4};
}
inline std::span<double> doubles(Image& img) { return img.span(); }
inline std::span<double> doubles(Vec3& v) { return {v.data(), 3}; }
inline std::span<double> doubles(double& v) { return {&v, 1}; }
template <std::size_t N>
std::span<double> doubles(std::array<double, N>& a) {
  return {a.data(), N};
}

}  // namespace umbra
