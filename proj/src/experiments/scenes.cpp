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

#include "umbra/experiments/scenes.hpp"

#include "umbra/scene/primitives.hpp"

namespace umbra {

Scene make_minimal_plane_scene(const MinimalPlaneOptions& options) {
  Scene scene;
  MeshInstance receiver;
  receiver.name = "receiver";
  receiver.mesh = make_plane(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 1.0, 1.0, 1);
  receiver.pivot = receiver.mesh.centroid();
  scene.meshes.push_back(std::move(receiver));

  MeshInstance occluder;
  occluder.name = "occluder";
  occluder.mesh = make_plane(Vec3(0.0, 0.0, options.occluder_height), Vec3::UnitX(), Vec3::UnitY(),
                             options.occluder_half, options.occluder_half, 1);
  occluder.pivot = occluder.mesh.centroid();
  scene.meshes.push_back(std::move(occluder));

  LightSource light;
  light.kind = LightKind::kDirectional;
  light.direction = options.light_direction;
  light.shadow_resolution = options.shadow_resolution;
  light.kernel = options.kernel;
  scene.lights.push_back(light);

  Camera camera;
  camera.kind = ProjectionKind::kOrthographic;
  camera.eye = Vec3(0.0, 0.0, 0.5 * options.occluder_height);
  camera.target = Vec3::Zero();
  camera.up = Vec3::UnitY();
  camera.half_width = camera.half_height = 1.0;
  camera.near = 0.01;
  camera.far = 1.0;
  camera.width = camera.height = options.resolution;
  scene.cameras.push_back(camera);

  scene.settings.antialias = options.antialias;
  scene.fit_directional_lights();
  return scene;
}

Scene make_pose_scene(const PoseSceneOptions& options) {
  Scene scene;
  MeshInstance wall;
  wall.name = "wall";
  wall.mesh = make_plane(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 2.5, 2.0, 1);
  wall.pivot = wall.mesh.centroid();
  scene.meshes.push_back(std::move(wall));

  MeshInstance object;
  object.name = "prism";
  std::vector<Vec2> footprint = {{-0.45, -0.3}, {0.1, -0.4}, {0.45, -0.05}, {0.2, 0.3}, {-0.3, 0.2}};
  for (Vec2& p : footprint) p += Vec2(0.9, 1.2);
  object.mesh = make_prism(footprint, -0.3, 0.3);
  object.pivot = object.mesh.centroid();
  scene.meshes.push_back(std::move(object));

  LightSource light;
  light.kind = LightKind::kSpot;
  light.position = Vec3(3.2, 2.2, 4.0);
  light.direction = Vec3(-0.3, -0.6, 0.0) - light.position;
  light.fov = radians(70.0);
  light.near = 1.0;
  light.far = 7.0;
  light.shadow_resolution = options.shadow_resolution;
  light.kernel = options.kernel;
  scene.lights.push_back(light);

  Camera camera;
  camera.kind = ProjectionKind::kPerspective;
  camera.eye = Vec3(-0.6, -0.8, 3.5);
  camera.target = Vec3(-0.4, -0.8, 0.0);
  camera.fov_y = radians(40.0);
  camera.near = 0.5;
  camera.far = 6.0;
  camera.width = camera.height = options.resolution;
  scene.cameras.push_back(camera);

  scene.settings.shadows = options.shadows;
  scene.settings.antialias = options.antialias;
  return scene;
}

Scene make_light_scene(const LightSceneOptions& options) {
  Scene scene;
  MeshInstance wall;
  wall.name = "wall";
  wall.mesh = make_plane(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 2.0, 2.0, 1);
  wall.pivot = wall.mesh.centroid();
  scene.meshes.push_back(std::move(wall));

  MeshInstance box;
  box.name = "box";
  box.mesh = make_box(Vec3(-0.7, 0.5, 0.5), Vec3(0.2, 0.25, 0.2));
  box.pivot = box.mesh.centroid();
  box.albedo = Vec3(0.9, 0.6, 0.4);
  scene.meshes.push_back(std::move(box));

  MeshInstance ball;
  ball.name = "ball";
  ball.mesh = make_icosphere(Vec3(0.2, -0.2, 0.8), 0.5, 3);
  ball.pivot = ball.mesh.centroid();
  ball.albedo = Vec3(0.5, 0.7, 0.9);
  scene.meshes.push_back(std::move(ball));

  const double share = 1.0 / static_cast<double>(std::max<std::size_t>(1, options.directions.size()));
  for (const Vec3& d : options.directions) {
    LightSource light;
    light.kind = LightKind::kDirectional;
    light.direction = d;
    light.intensity = Vec3::Constant(share);
    light.shadow_resolution = options.shadow_resolution;
    light.kernel = options.kernel;
    scene.lights.push_back(light);
  }

  Camera camera;
  camera.kind = ProjectionKind::kPerspective;
  camera.eye = Vec3(0.3, 0.4, 4.5);
  camera.target = Vec3(0.0, 0.0, 0.3);
  camera.fov_y = radians(45.0);
  camera.near = 0.5;
  camera.far = 8.0;
  camera.width = camera.height = options.resolution;
  scene.cameras.push_back(camera);

  scene.fit_directional_lights();
  return scene;
}

}  // namespace umbra
