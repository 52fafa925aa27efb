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

#include "umbra/shade/shading.hpp"

#include "umbra/render/renderer.hpp"

namespace umbra {

LightDirection light_direction(const LightSource& light, const ProjectionFrame& frame, const Vec3& x) {
  LightDirection d;
  if (light.kind == LightKind::kDirectional) {
    d.scale = light.direction.norm();
    d.l = -light.direction / d.scale;
  } else {
    const Vec3 r = light.position - x;
    d.scale = r.norm();
    d.l = r / d.scale;
    d.inside = frame.in_footprint(frame.project(x));
  }
  return d;
}

Vec3 shade_point(const Vec3& x, const Vec3& n, const Vec3& albedo, std::span<const LightSource> lights,
                 std::span<const ProjectionFrame> frames, std::span<const double> visibility) {
  Vec3 sum = Vec3::Zero();
  for (std::size_t l = 0; l < lights.size(); ++l) {
    const LightDirection d = light_direction(lights[l], frames[l], x);
    const double cosine = n.dot(d.l);
    if (!(cosine > 0.0) || !d.inside) continue;
    const double v = visibility.empty() ? 1.0 : visibility[l];
    sum += lights[l].intensity * (cosine * v);
  }
  return albedo.cwiseProduct(sum);
}

namespace {

Scene without_parameters(const Scene& scene) {
  Scene copy = scene;
  copy.parameters.clear();
  return copy;
}

}  // namespace

GeometryBuffer gbuffer_pass(const Scene& scene, int camera) {
  Scene copy = without_parameters(scene);
  copy.settings.shadows = false;
  Renderer renderer(std::move(copy));
  renderer.render();
  const ViewPass& view = renderer.context().views.at(camera);
  GeometryBuffer g;
  g.width = view.raster.width;
  g.height = view.raster.height;
  g.position = view.position;
  g.normal = view.normal;
  g.albedo = view.albedo;
  g.tri = view.raster.tri;
  return g;
}

Image shade(const GeometryBuffer& gbuffer, const Scene& scene, const std::vector<Image>& visibility) {
  std::vector<ProjectionFrame> frames;
  for (const LightSource& light : scene.lights) frames.push_back(light_frame(light));
  Image out(gbuffer.width, gbuffer.height, 3);
  std::vector<double> vis(visibility.empty() ? 0 : scene.lights.size());
  for (int p = 0; p < gbuffer.width * gbuffer.height; ++p) {
    Vec3 c = scene.settings.background;
    if (gbuffer.covered(p)) {
      for (std::size_t l = 0; l < vis.size(); ++l) vis[l] = visibility[l](p);
      const Vec3 x(gbuffer.position(p, 0), gbuffer.position(p, 1), gbuffer.position(p, 2));
      const Vec3 n(gbuffer.normal(p, 0), gbuffer.normal(p, 1), gbuffer.normal(p, 2));
      const Vec3 a(gbuffer.albedo(p, 0), gbuffer.albedo(p, 1), gbuffer.albedo(p, 2));
      c = shade_point(x, n, a, scene.lights, frames, vis);
    }
    for (int k = 0; k < 3; ++k) out(p, k) = c[k];
  }
  return out;
}

Image render(const Scene& scene, int camera) {
  Renderer renderer(without_parameters(scene));
  renderer.render();
  return renderer.image(camera);
}

}  // namespace umbra
