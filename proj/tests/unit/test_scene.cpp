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

#include "umbra/scene/light.hpp"
#include "umbra/scene/obj.hpp"
#include "umbra/scene/primitives.hpp"
#include "umbra/scene/scene.hpp"
#include "umbra/scene/scene_io.hpp"
#include "umbra/core/rng.hpp"
#include "umbra/raster/rasterizer.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <sstream>

namespace umbra {
namespace {

LightSource down_light() {
  LightSource l;
  l.kind = LightKind::kDirectional;
  l.direction = -Vec3::UnitZ();
  l.fit.center = Vec3::Zero();
  l.fit.radius = 1.0;
  l.shadow_resolution = 64;
  return l;
}

TEST(LightTransform, DirectionalDepthEndpoints) {
  const ProjectionFrame f = light_frame(down_light());
  EXPECT_NEAR(f.project(Vec3(0, 0, 1)).d, 0.0, 1e-12);
  EXPECT_NEAR(f.project(Vec3(0, 0, -1)).d, 1.0, 1e-12);
  EXPECT_NEAR(f.project(Vec3(0, 0, 0)).d, 0.5, 1e-12);
}

TEST(LightTransform, SpotOnAxisAtFar) {
  LightSource l;
  l.kind = LightKind::kSpot;
  l.position = Vec3::Zero();
  l.direction = Vec3(0.3, -0.2, -1.0);
  l.fov = radians(90.0);
  l.near = 0.5;
  l.far = 4.0;
  l.shadow_resolution = 32;
  const ProjectionFrame f = light_frame(l);
  const ScreenPoint s = f.project(l.direction.normalized() * l.far);
  EXPECT_NEAR(s.sx / f.width, 0.5, 1e-12);
  EXPECT_NEAR(s.sy / f.height, 0.5, 1e-12);
  EXPECT_NEAR(s.d, 1.0, 1e-12);
}

TEST(LightTransform, DepthInUnitRangeInsideFrustum) {
  LightSource l = down_light();
  l.direction = Vec3(0.4, -0.3, -1.0).normalized();
  const ProjectionFrame f = light_frame(l);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    Vec3 x = rng.unit_vector() * std::cbrt(rng.uniform());
    const double d = f.project(x).d;
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(LightTransform, DepthIsLinearAlongTheLight) {
  const LightSource l = down_light();
  const ProjectionFrame f = light_frame(l);
  const double a = f.project(Vec3(0.2, 0.1, 0.6)).d;
  const double b = f.project(Vec3(-0.3, 0.4, -0.2)).d;
  const double mid = f.project(Vec3(-0.05, 0.25, 0.2)).d;
  EXPECT_NEAR(mid, 0.5 * (a + b), 1e-12);
}

TEST(LightTransform, DirectionalKeepsCollinearPointsCollinear) {
  LightSource l = down_light();
  l.direction = Vec3(0.2, 0.5, -1.0).normalized();
  const ProjectionFrame f = light_frame(l);
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a = rng.unit_vector() * 0.8, b = rng.unit_vector() * 0.8;
    const double t = rng.uniform();
    const ScreenPoint pa = f.project(a), pb = f.project(b), pc = f.project(a + t * (b - a));
    const double area = cross2(pb.sx - pa.sx, pb.sy - pa.sy, pc.sx - pa.sx, pc.sy - pa.sy);
    EXPECT_NEAR(area, 0.0, 1e-9);
  }
}

TEST(LightSourceValidate, RejectsBadSpotFov) {
  LightSource l;
  l.kind = LightKind::kSpot;
  l.direction = -Vec3::UnitZ();
  l.fov = kPi;
  EXPECT_THROW(l.validate(), ConfigError);
  l.fov = radians(60.0);
  l.near = 2.0;
  l.far = 1.0;
  EXPECT_THROW(l.validate(), ConfigError);
}

TEST(CameraValidate, RejectsBadRangeAndResolution) {
  Camera c;
  c.near = 1.0;
  c.far = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c.far = 2.0;
  c.width = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ApplyPose, IdentityAndTranslation) {
  const TriangleMesh m = make_icosphere(Vec3(0.3, -0.2, 0.5), 0.4, 1);
  const TriangleMesh same = apply_pose(m, {});
  for (int i = 0; i < m.vertex_count(); ++i) EXPECT_EQ(same.positions[i], m.positions[i]);
  const TriangleMesh moved = apply_pose(m, {1.0, 2.0, 0.0});
  for (int i = 0; i < m.vertex_count(); ++i) {
    EXPECT_TRUE(moved.positions[i].isApprox(m.positions[i] + Vec3(1, 2, 0), 1e-14));
  }
}

TEST(ApplyPose, HalfTurnTwiceIsIdentity) {
  const TriangleMesh m = make_box(Vec3(0.1, 0.2, 0.3), Vec3(0.5, 0.2, 0.3));
  const TriangleMesh twice = apply_pose(apply_pose(m, {0.0, 0.0, kPi}), {0.0, 0.0, kPi});
  for (int i = 0; i < m.vertex_count(); ++i) EXPECT_LT((twice.positions[i] - m.positions[i]).norm(), 1e-6);
}

TEST(ApplyPose, RotatesAboutTheCentroidUpAxis) {
  const TriangleMesh m = make_box(Vec3(1.0, 0.0, 0.0), Vec3(0.2, 0.2, 0.2));
  const TriangleMesh r = apply_pose(m, {0.0, 0.0, 0.7});
  EXPECT_LT((r.centroid() - m.centroid()).norm(), 1e-12);
  for (int i = 0; i < m.vertex_count(); ++i) EXPECT_NEAR(r.positions[i].y(), m.positions[i].y(), 1e-14);
}

Scene two_mesh_scene() {
  Scene s;
  MeshInstance a;
  a.name = "a";
  a.mesh = make_plane(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 1.0, 1.0, 2);
  a.pivot = a.mesh.centroid();
  s.meshes.push_back(a);
  MeshInstance b = a;
  b.name = "b";
  s.meshes.push_back(b);
  s.lights.push_back(down_light());
  return s;
}

TEST(Parameters, EmptyBindingGathersNothing) {
  const Scene s = two_mesh_scene();
  EXPECT_EQ(s.parameters.size(), 0);
  EXPECT_TRUE(s.parameters.gather(s).empty());
}

TEST(Parameters, OneVertexIsThreeScalars) {
  Scene s = two_mesh_scene();
  Binding b;
  b.kind = BindingKind::kVertices;
  b.target = 0;
  b.vertices = {4};
  s.bind(b);
  EXPECT_EQ(s.parameters.size(), 3);
  const std::vector<double> p = s.parameters.gather(s);
  EXPECT_EQ(p[0], s.meshes[0].mesh.positions[4].x());
  EXPECT_EQ(p[2], s.meshes[0].mesh.positions[4].z());
}

TEST(Parameters, PerturbingOneSlotChangesOneScalar) {
  Scene s = two_mesh_scene();
  Binding v;
  v.kind = BindingKind::kVertices;
  v.target = 1;
  v.vertices = {0, 3, 5};
  s.bind(v);
  Binding pose;
  pose.kind = BindingKind::kPose;
  pose.target = 0;
  s.bind(pose);
  Binding dir;
  dir.kind = BindingKind::kLightDirection;
  dir.target = 0;
  s.bind(dir);
  const std::vector<double> p0 = s.parameters.gather(s);
  for (std::size_t i = 0; i < p0.size(); ++i) {
    Scene t = s;
    std::vector<double> p = p0;
    p[i] += 1e-3;
    t.parameters.scatter(t, p);
    const std::vector<double> back = t.parameters.gather(t);
    for (std::size_t j = 0; j < p0.size(); ++j) {
      if (j == i) {
        EXPECT_EQ(back[j], p[j]);
      } else {
        EXPECT_EQ(back[j], p0[j]);
      }
    }
  }
}

TEST(Parameters, RoundTripIsBitwise) {
  Scene s = two_mesh_scene();
  Binding v;
  v.kind = BindingKind::kVertices;
  v.target = 0;
  for (int i = 0; i < s.meshes[0].mesh.vertex_count(); ++i) v.vertices.push_back(i);
  s.bind(v);
  Binding t;
  t.kind = BindingKind::kTranslation;
  t.target = 1;
  s.bind(t);
  Rng rng(5);
  std::vector<double> p(s.parameters.size());
  for (double& x : p) x = rng.uniform(-3.0, 3.0);
  s.parameters.scatter(s, p);
  EXPECT_EQ(s.parameters.gather(s), p);
}

TEST(Parameters, OverlapIsAConfigError) {
  Scene s = two_mesh_scene();
  Binding a;
  a.kind = BindingKind::kVertices;
  a.target = 0;
  a.vertices = {1, 2};
  s.bind(a);
  Binding b = a;
  b.vertices = {2};
  b.axes = {1};
  EXPECT_THROW(s.bind(b), ConfigError);
  Binding c = a;
  c.target = 1;
  EXPECT_NO_THROW(s.bind(c));
  Binding dup;
  dup.kind = BindingKind::kVertices;
  dup.target = 1;
  dup.vertices = {7, 7};
  EXPECT_THROW(s.bind(dup), ConfigError);
}

TEST(MeshValidate, RejectsBrokenMeshes) {
  TriangleMesh m = make_plane(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 1.0, 1.0);
  EXPECT_NO_THROW(m.validate());
  TriangleMesh repeated = m;
  repeated.faces[0] = {0, 0, 1};
  EXPECT_THROW(repeated.validate(), ConfigError);
  TriangleMesh range = m;
  range.faces[0][2] = 99;
  EXPECT_THROW(range.validate(), ConfigError);
  TriangleMesh nan = m;
  nan.positions[1].x() = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(nan.validate(), ConfigError);
}

TEST(Obj, ReadsPolygonsAndRelativeIndices) {
  std::istringstream in(
      "# quad and a triangle\n"
      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\n"
      "f 1/1/1 2/1/1 3/1/1 4/1/1\n"
      "v 2 0 0\n"
      "f -1 -4 -3\n");
  const TriangleMesh m = read_obj(in);
  ASSERT_EQ(m.vertex_count(), 5);
  ASSERT_EQ(m.face_count(), 3);
  EXPECT_EQ(m.faces[0], (Face{0, 1, 2}));
  EXPECT_EQ(m.faces[1], (Face{0, 2, 3}));
  EXPECT_EQ(m.faces[2], (Face{4, 1, 2}));
}

TEST(Obj, WriteReadRoundTrip) {
  const TriangleMesh m = make_icosphere(Vec3(0.1, 0.2, 0.3), 0.7, 1);
  std::stringstream io;
  write_obj(io, m);
  const TriangleMesh back = read_obj(io);
  ASSERT_EQ(back.faces, m.faces);
  for (int i = 0; i < m.vertex_count(); ++i) EXPECT_EQ(back.positions[i], m.positions[i]);
}

TEST(Obj, NormalizeToUnitCube) {
  TriangleMesh m = make_box(Vec3(5.0, -2.0, 1.0), Vec3(2.0, 1.0, 0.5));
  normalize_to_unit_cube(m);
  Vec3 lo, hi;
  m.bounds(lo, hi);
  EXPECT_NEAR(hi.x(), 1.0, 1e-12);
  EXPECT_NEAR(lo.x(), -1.0, 1e-12);
  EXPECT_NEAR(hi.y(), 0.5, 1e-12);
}

TEST(SceneJson, LoadsTheExampleScene) {
  const Scene s = load_scene(std::string(UMBRA_SOURCE_DIR) + "/configs/scenes/two_lights.json");
  EXPECT_EQ(s.meshes.size(), 3u);
  EXPECT_EQ(s.lights.size(), 2u);
  EXPECT_EQ(s.cameras.size(), 1u);
  EXPECT_EQ(s.lights[1].kind, LightKind::kSpot);
  EXPECT_EQ(s.lights[1].kernel.shape, FilterKernel::Shape::kGaussian);
  EXPECT_GT(s.lights[0].fit.radius, 0.0);
}

TEST(SceneJson, BindingsFromJson) {
  const Scene s = load_scene(std::string(UMBRA_SOURCE_DIR) + "/configs/scenes/minimal_plane.json");
  ASSERT_EQ(s.parameters.bindings().size(), 1u);
  EXPECT_EQ(s.parameters.size(), 2);
  EXPECT_EQ(s.parameters.bindings()[0].target, 1);
}

TEST(SceneJson, RejectsUnknownPrimitive) {
  const nlohmann::json j = {{"meshes", {{{"primitive", "teapot"}}}}};
  EXPECT_THROW(scene_from_json(j), ConfigError);
}

TEST(SceneJson, LightRoundTrip) {
  LightSource l;
  l.kind = LightKind::kSpot;
  l.position = Vec3(1, 2, 3);
  l.direction = Vec3(-1, -2, -3);
  l.fov = radians(50.0);
  l.near = 0.5;
  l.far = 9.0;
  l.kernel = {FilterKernel::Shape::kGaussian, 7};
  const LightSource back = light_from_json(light_to_json(l));
  EXPECT_TRUE(back.position.isApprox(l.position));
  EXPECT_NEAR(back.fov, l.fov, 1e-12);
  EXPECT_EQ(back.kernel.size, 7);
  EXPECT_EQ(back.kernel.shape, FilterKernel::Shape::kGaussian);
}

}  // namespace
}  // namespace umbra
