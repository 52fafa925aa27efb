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

#include "umbra/scene/scene.hpp"

namespace umbra {

// A square receiver in the z = 0 plane lit straight down by a directional
// light, with a square occluder above it. The camera is orthographic and
// sits between occluder and receiver, so its image is the receiver's
// visibility.
struct MinimalPlaneOptions {
  int resolution = 64;
  int shadow_resolution = 64;
  FilterKernel kernel{FilterKernel::Shape::kBox, 5};
  bool antialias = true;
  double occluder_half = 0.25;
  double occluder_height = 0.5;
  Vec3 light_direction = Vec3(0.0, 0.0, -1.0);
};

Scene make_minimal_plane_scene(const MinimalPlaneOptions& options);

// Index of the occluder instance in the minimal-plane scene.
inline constexpr int kMinimalPlaneOccluder = 1;

}  // namespace umbra

namespace umbra {

// An asymmetric convex prism standing in front of a wall (the z = 0 plane),
// lit by a spot light from the side. The perspective camera frames the wall
// region where the shadow falls; the object itself sits beside the camera's
// view, so the pose signal comes from the shadow.
struct PoseSceneOptions {
  int resolution = 256;
  int shadow_resolution = 256;
  FilterKernel kernel{FilterKernel::Shape::kBox, 5};
  bool shadows = true;
  bool antialias = true;
};

Scene make_pose_scene(const PoseSceneOptions& options);

inline constexpr int kPoseObject = 1;

}  // namespace umbra

namespace umbra {

// A box and a sphere in front of a wall (the z = 0 plane), lit by `lights`
// directional lights of equal total intensity. The perspective camera sees
// both objects and their shadows.
struct LightSceneOptions {
  int resolution = 128;
  int shadow_resolution = 128;
  FilterKernel kernel{FilterKernel::Shape::kBox, 5};
  std::vector<Vec3> directions = {Vec3(0.3, -0.4, -1.0)};
};

Scene make_light_scene(const LightSceneOptions& options);

}  // namespace umbra
