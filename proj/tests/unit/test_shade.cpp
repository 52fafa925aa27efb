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

#include "fixtures.hpp"

#include <gtest/gtest.h>

namespace umbra {
namespace {

LightSource overhead(Vec3 intensity = Vec3::Ones()) {
  LightSource l;
  l.kind = LightKind::kDirectional;
  l.direction = Vec3(0.0, 0.0, -2.0);
  l.intensity = intensity;
  return l;
}

TEST(ShadePoint, Lambertian) {
  const std::vector<LightSource> lights = {overhead(Vec3(1.0, 0.5, 2.0))};
  const std::vector<ProjectionFrame> frames = {light_frame(lights[0])};
  const Vec3 albedo(0.5, 0.4, 0.3);
  const Vec3 n = Vec3(0.0, std::sin(0.6), std::cos(0.6));
  const Vec3 c = shade_point(Vec3::Zero(), n, albedo, lights, frames, {});
  EXPECT_NEAR(c.x(), 0.5 * 1.0 * std::cos(0.6), 1e-12);
  EXPECT_NEAR(c.y(), 0.4 * 0.5 * std::cos(0.6), 1e-12);
  EXPECT_NEAR(c.z(), 0.3 * 2.0 * std::cos(0.6), 1e-12);
}

TEST(ShadePoint, FacingAwayIsBlack) {
  const std::vector<LightSource> lights = {overhead()};
  const std::vector<ProjectionFrame> frames = {light_frame(lights[0])};
  EXPECT_EQ(shade_point(Vec3::Zero(), -Vec3::UnitZ(), Vec3::Ones(), lights, frames, {}), Vec3::Zero());
}

TEST(ShadePoint, VisibilityScalesEachLight) {
  const std::vector<LightSource> lights = {overhead(), overhead(Vec3::Constant(2.0))};
  const std::vector<ProjectionFrame> frames = {light_frame(lights[0]), light_frame(lights[1])};
  const std::vector<double> vis = {0.25, 0.5};
  const Vec3 c = shade_point(Vec3::Zero(), Vec3::UnitZ(), Vec3::Ones(), lights, frames, vis);
  EXPECT_NEAR(c.x(), 0.25 + 1.0, 1e-12);
}

TEST(ShadePoint, SpotConeCutsOff) {
  LightSource spot;
  spot.kind = LightKind::kSpot;
  spot.position = Vec3(0.0, 0.0, 1.0);
  spot.direction = -Vec3::UnitZ();
  spot.fov = radians(40.0);
  const std::vector<LightSource> lights = {spot};
  const std::vector<ProjectionFrame> frames = {light_frame(spot)};
  const LightDirection in = light_direction(spot, frames[0], Vec3::Zero());
  EXPECT_TRUE(in.inside);
  EXPECT_NEAR(in.l.z(), 1.0, 1e-12);
  EXPECT_NEAR(in.scale, 1.0, 1e-12);
  EXPECT_FALSE(light_direction(spot, frames[0], Vec3(2.0, 0.0, 0.0)).inside);
  EXPECT_EQ(shade_point(Vec3(2.0, 0.0, 0.0), Vec3::UnitZ(), Vec3::Ones(), lights, frames, {}), Vec3::Zero());
}

TEST(GBuffer, NormalsAreUnitAndFaceTheCamera) {
  const Scene scene = make_minimal_plane_scene({});
  const GeometryBuffer g = gbuffer_pass(scene, 0);
  const Vec3 eye = scene.cameras[0].eye;
  int covered = 0;
  for (int p = 0; p < g.width * g.height; ++p) {
    if (!g.covered(p)) continue;
    ++covered;
    const Vec3 n(g.normal(p, 0), g.normal(p, 1), g.normal(p, 2));
    const Vec3 x(g.position(p, 0), g.position(p, 1), g.position(p, 2));
    EXPECT_NEAR(n.norm(), 1.0, 1e-12);
    EXPECT_GE(n.dot(eye - x), 0.0);
  }
  EXPECT_GT(covered, 0);
}

TEST(Shade, EmptySceneIsBackground) {
  Scene scene = make_minimal_plane_scene({});
  scene.meshes.clear();
  scene.settings.background = Vec3(0.1, 0.2, 0.3);
  const Image img = render(scene, 0);
  for (int p = 0; p < img.pixel_count(); ++p) {
    EXPECT_EQ(img(p, 0), 0.1);
    EXPECT_EQ(img(p, 1), 0.2);
    EXPECT_EQ(img(p, 2), 0.3);
  }
}

TEST(ShadeProperty, ShadowsOnlyDarken) {
  Scene lit = make_minimal_plane_scene({});
  lit.settings.shadows = false;
  const Scene shadowed = make_minimal_plane_scene({});
  const Image a = render(lit, 0), b = render(shadowed, 0);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LE(b.values()[i], a.values()[i] + 1e-12);
    diff += a.values()[i] - b.values()[i];
  }
  EXPECT_GT(diff, 1.0);
}

TEST(ShadeProperty, LinearInLightIntensity) {
  Scene one = make_minimal_plane_scene({});
  one.settings.camera_antialias = false;
  Scene two = one;
  for (LightSource& l : two.lights) l.intensity *= 2.0;
  const Image a = render(one, 0), b = render(two, 0);
  const GeometryBuffer g = gbuffer_pass(one, 0);
  for (int p = 0; p < a.pixel_count(); ++p) {
    if (!g.covered(p)) continue;
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(b(p, c), 2.0 * a(p, c), 1e-12);
  }
}

TEST(Render, MatchesTheRendererPipeline) {
  Renderer r(testing::bound_minimal_plane());
  r.render();
  const Image direct = render(r.current_scene(), 0);
  const Image& piped = r.image(0);
  ASSERT_TRUE(direct.same_shape(piped));
  double worst = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) worst = std::max(worst, std::abs(direct.values()[i] - piped.values()[i]));
  EXPECT_LT(worst, 1e-12);
}

}  // namespace
}  // namespace umbra
