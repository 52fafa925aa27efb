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

#include "umbra/experiments/render_compare.hpp"

#include "umbra/experiments/scenes.hpp"
#include "umbra/scene/primitives.hpp"

#include <cmath>

namespace umbra {

Scene make_acne_scene(const AcneSceneOptions& options) {
  Scene scene;
  const double s = radians(options.slant_deg);
  MeshInstance receiver;
  receiver.name = "receiver";
  receiver.mesh = make_plane(Vec3::Zero(), Vec3::UnitX(), Vec3(0.0, std::cos(s), std::sin(s)), 1.2, 1.2, 1);
  receiver.pivot = receiver.mesh.centroid();
  scene.meshes.push_back(std::move(receiver));

  if (options.occluder) {
    MeshInstance box;
    box.name = "box";
    box.mesh = make_box(Vec3(-0.15, 0.1, 0.75), Vec3(0.2, 0.2, 0.2));
    box.pivot = box.mesh.centroid();
    scene.meshes.push_back(std::move(box));
  }

  LightSource light;
  light.kind = LightKind::kDirectional;
  light.direction = options.light_direction;
  light.shadow_resolution = options.shadow_resolution;
  light.kernel = options.kernel;
  scene.lights.push_back(light);

  Camera camera;
  camera.kind = ProjectionKind::kPerspective;
  camera.eye = Vec3(0.2, -1.2, 3.2);
  camera.target = Vec3(0.0, 0.0, 0.0);
  camera.fov_y = radians(40.0);
  camera.near = 0.5;
  camera.far = 8.0;
  camera.width = camera.height = options.resolution;
  scene.cameras.push_back(camera);

  scene.fit_directional_lights();
  return scene;
}

ShadowComparison compare_shadows(const Scene& scene, double bias, int camera, int light) {
  Scene s = scene;
  s.settings.shadows = true;
  Renderer renderer(std::move(s));
  renderer.render();
  const RenderContext& ctx = renderer.context();
  const ViewPass& view = ctx.views.at(camera);
  const LightPass& pass = ctx.lights.at(light);
  ProjectionFrame frame = pass.projection;
  frame.basis = FrameBasis::unpack(pass.frame);

  ShadowComparison out;
  const int w = view.raster.width, h = view.raster.height;
  out.classic = Image(w, h, 1, 1.0);
  out.biased = Image(w, h, 1, 1.0);
  out.variance = view.visibility.at(light);
  out.shaded = view.image;
  out.moments = pass.moments;
  for (int p = 0; p < w * h; ++p) {
    if (!view.raster.covered(p)) continue;
    const Vec3 x(view.position(p, 0), view.position(p, 1), view.position(p, 2));
    out.classic(p) = classic_visibility(x, frame, pass.raster, 0.0);
    out.biased(p) = classic_visibility(x, frame, pass.raster, bias);
    ++out.covered;
    if (out.classic(p) < 0.5) ++out.dark_classic;
    if (out.biased(p) < 0.5) ++out.dark_biased;
    if (out.variance(p) < 0.5) ++out.dark_variance;
  }
  return out;
}

std::vector<int> penumbra_widths(const std::vector<int>& kernel_sizes, int resolution) {
  std::vector<int> out;
  for (int k : kernel_sizes) {
    MinimalPlaneOptions o;
    o.resolution = resolution;
    o.shadow_resolution = resolution;
    o.kernel = FilterKernel{FilterKernel::Shape::kBox, k};
    Renderer renderer(make_minimal_plane_scene(o));
    renderer.render();
    const Image& v = renderer.visibility(0, 0);
    int n = 0;
    for (double x : v.values()) {
      if (x > 0.02 && x < 0.98) ++n;
    }
    out.push_back(n);
  }
  return out;
}

double missed_shadow_fraction(int shadow_resolution, double bar_width, int resolution) {
  MinimalPlaneOptions o;
  o.resolution = resolution;
  o.shadow_resolution = shadow_resolution;
  o.kernel = FilterKernel{FilterKernel::Shape::kBox, 3};
  Scene scene = make_minimal_plane_scene(o);
  const double a = radians(30.0);
  const Vec3 along(std::cos(a), std::sin(a), 0.0), across(-std::sin(a), std::cos(a), 0.0);
  const double half_length = 0.7;
  scene.meshes[kMinimalPlaneOccluder].mesh =
      make_plane(Vec3(0.0, 0.0, o.occluder_height), along, across, half_length, 0.5 * bar_width, 1);
  scene.meshes[kMinimalPlaneOccluder].pivot = scene.meshes[kMinimalPlaneOccluder].mesh.centroid();
  scene.fit_directional_lights();

  Renderer renderer(std::move(scene));
  renderer.render();
  const ViewPass& view = renderer.context().views[0];
  const Image& vis = view.visibility[0];
  int under = 0, missed = 0;
  for (int p = 0; p < view.raster.pixel_count(); ++p) {
    if (!view.raster.covered(p)) continue;
    const Vec3 x(view.position(p, 0), view.position(p, 1), 0.0);
    if (std::abs(x.dot(along)) > half_length || std::abs(x.dot(across)) > 0.5 * bar_width) continue;
    ++under;
    if (vis(p) > 0.9) ++missed;
  }
  return under == 0 ? 0.0 : static_cast<double>(missed) / under;
}

}  // namespace umbra
