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

#include "umbra/experiments/config.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace umbra {
namespace {

TEST(GreedyMatch, PairsTheClosestDirections) {
  const std::vector<Vec3> t = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  const std::vector<Vec3> e = {Vec3(0.1, 0.0, 1.0), Vec3(1.0, 0.1, 0.0), Vec3(0.0, 1.0, 0.2)};
  EXPECT_EQ(greedy_match(e, t), (std::vector<int>{2, 0, 1}));
}

TEST(GreedyMatchProperty, IsABijection) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + rng.index(6);
    std::vector<Vec3> a(n), b(n);
    for (Vec3& v : a) v = rng.unit_vector();
    for (Vec3& v : b) v = rng.unit_vector();
    std::vector<int> m = greedy_match(a, b);
    std::sort(m.begin(), m.end());
    for (int i = 0; i < n; ++i) EXPECT_EQ(m[i], i);
  }
}

TEST(AlignmentProperty, PermutedScaledTargetsAlignPerfectly) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> t(4), e;
    for (Vec3& v : t) v = rng.unit_vector();
    for (int i = 3; i >= 0; --i) e.push_back(t[i] * rng.uniform(0.5, 3.0));
    EXPECT_NEAR(alignment(e, t), 1.0, 1e-12);
    const std::vector<Vec3> flipped = {-t[0], -t[1], -t[2], -t[3]};
    EXPECT_LT(alignment(flipped, t), 1.0);
  }
}

TEST(LightEstimation, SamplesStayInTheCone) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const Vec3 d = sample_light_direction(rng, 30.0);
    EXPECT_NEAR(d.norm(), 1.0, 1e-12);
    EXPECT_GE(-d.z(), std::cos(radians(30.0)) - 1e-12);
  }
}

TEST(LightEstimation, StartingAtTheTruthStaysThere) {
  LightEstimationConfig c;
  c.scene.resolution = 48;
  c.scene.shadow_resolution = 48;
  c.iterations = 5;
  const std::vector<Vec3> truth = {Vec3(0.2, -0.1, -1.0).normalized()};
  const LightRun r = run_light_once(c, truth, truth);
  EXPECT_NEAR(r.alignment, 1.0, 1e-9);
}

TEST(Pose, SamplesAreSeededAndInRange) {
  for (int i = 0; i < 20; ++i) {
    const RigidPose2p5D a = sample_pose(7, i, 0.3, 45.0);
    const RigidPose2p5D b = sample_pose(7, i, 0.3, 45.0);
    EXPECT_EQ(a.tx, b.tx);
    EXPECT_EQ(a.phi, b.phi);
    EXPECT_LE(std::abs(a.tx), 0.3);
    EXPECT_LE(std::abs(a.ty), 0.3);
    EXPECT_LE(std::abs(a.phi), radians(45.0));
  }
  EXPECT_NE(sample_pose(7, 0, 0.3, 45.0).tx, sample_pose(8, 0, 0.3, 45.0).tx);
}

TEST(Pose, ZeroOffsetIsAFixedPoint) {
  PoseConfig c;
  c.scene.resolution = 64;
  c.scene.shadow_resolution = 64;
  c.iterations = 5;
  const RigidPose2p5D target{0.1, -0.05, radians(10.0)};
  const PoseRun r = run_pose_once(c, target, target);
  EXPECT_LT(r.rotation_error_deg, 1e-4);
  EXPECT_LT(r.translation_error, 1e-4);
}

TEST(MinimalPlane, ZeroDisplacementStopsImmediately) {
  MinimalPlaneConfig c;
  c.offset = Vec2::Zero();
  const MinimalPlaneResult r = run_minimal_plane(c);
  EXPECT_EQ(r.trace.records.size(), 1u);
  EXPECT_EQ(r.final_error, 0.0);
  EXPECT_EQ(r.final_loss, 0.0);
}

TEST(MinimalPlane, RecoversASmallOffset) {
  MinimalPlaneConfig c;
  c.iterations = 80;
  const MinimalPlaneResult r = run_minimal_plane(c);
  EXPECT_LT(r.final_error, 0.1 * r.initial_error);
}

ShadowArtConfig small_shadow_art() {
  ShadowArtConfig c;
  c.resolution = 40;
  c.shadow_resolution = 64;
  c.segments = 16;
  c.stacks = 17;
  c.iterations = 8;
  return c;
}

TEST(ShadowArt, SelfTargetIsAFixedPoint) {
  ShadowArtConfig c = small_shadow_art();
  c.normal_weight = 0.0;
  c.targets = {TargetShape{TargetShape::Kind::kSelf}};
  const ShadowArtResult r = run_shadow_art(c);
  EXPECT_EQ(r.iou[0], 1.0);
  const TriangleMesh start = make_shadow_art_scene(c).meshes[0].mesh;
  double moved = 0.0;
  for (int i = 0; i < start.vertex_count(); ++i) {
    moved = std::max(moved, (r.mesh.positions[i] - start.positions[i]).norm());
  }
  EXPECT_LT(moved, 1e-4);
}

TEST(ShadowArt, ReparameterizationRoundTrips) {
  ShadowArtProblem problem(small_shadow_art());
  const std::vector<double> u0 = problem.initial_parameters();
  const std::vector<Vec3> x = problem.positions(u0);
  const TriangleMesh start = make_shadow_art_scene(small_shadow_art()).meshes[0].mesh;
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT((x[i] - start.positions[i]).norm(), 1e-10);
}

TEST(ShadowArt, IouOfDisjointAndIdenticalMasks) {
  Image a(4, 1, 1, 1.0), b(4, 1, 1, 1.0);
  EXPECT_EQ(shadow_iou(a, b), 1.0);
  a.at(0, 0) = 0.0;
  b.at(3, 0) = 0.0;
  EXPECT_EQ(shadow_iou(a, b), 0.0);
  b.at(0, 0) = 0.0;
  EXPECT_DOUBLE_EQ(shadow_iou(a, b), 0.5);
}

TEST(ShadowArt, DiskTargetIsCentered) {
  const ShadowArtConfig c = small_shadow_art();
  const Scene s = make_shadow_art_scene(c);
  const Image t = shape_target(s, 0, TargetShape{TargetShape::Kind::kDisk, 0.5});
  int dark = 0;
  double cx = 0.0, cy = 0.0;
  for (int y = 0; y < t.height(); ++y) {
    for (int x = 0; x < t.width(); ++x) {
      if (t.at(x, y) >= 0.5) continue;
      ++dark, cx += x + 0.5, cy += y + 0.5;
    }
  }
  ASSERT_GT(dark, 0);
  EXPECT_NEAR(cx / dark, t.width() / 2.0, 1.0);
  EXPECT_NEAR(cy / dark, t.height() / 2.0, 1.0);
}

TEST(Config, UnknownKeysAreRejected) {
  const CommonOverrides none;
  EXPECT_THROW(minimal_plane_config(nlohmann::json{{"iteratons", 3}}, none), ConfigError);
  EXPECT_THROW(shadow_art_config(nlohmann::json{{"optimizer", {{"stepsize", 1}}}}, none), ConfigError);
  EXPECT_THROW(pose_config(nlohmann::json{{"runs", "ten"}}, none), ConfigError);
}

TEST(Config, OverridesApplyAfterTheFile) {
  CommonOverrides o;
  o.kernel_size = 9;
  o.no_antialias = true;
  o.shadow_resolution = 32;
  const MinimalPlaneConfig c = minimal_plane_config(nlohmann::json{{"kernel", {{"size", 3}}}}, o);
  EXPECT_EQ(c.scene.kernel.size, 9);
  EXPECT_FALSE(c.scene.antialias);
  EXPECT_EQ(c.scene.shadow_resolution, 32);
}

TEST(Config, ShippedConfigsParse) {
  const std::string dir = std::string(UMBRA_SOURCE_DIR) + "/configs/";
  const CommonOverrides none;
  EXPECT_NO_THROW(gradcheck_config(load_json(dir + "gradcheck.json"), none));
  EXPECT_NO_THROW(minimal_plane_config(load_json(dir + "minimal_plane.json"), none));
  EXPECT_NO_THROW(robustness_config(load_json(dir + "robustness.json"), none));
  EXPECT_NO_THROW(pose_config(load_json(dir + "pose.json"), none));
  EXPECT_NO_THROW(light_estimation_config(load_json(dir + "light_estimation_1.json"), none));
  EXPECT_NO_THROW(light_estimation_config(load_json(dir + "light_estimation_4.json"), none));
  EXPECT_NO_THROW(shadow_art_config(load_json(dir + "shadow_art_disk.json"), none));
  EXPECT_NO_THROW(shadow_art_config(load_json(dir + "shadow_art_two_views.json"), none));
  EXPECT_NO_THROW(acne_config(load_json(dir + "render.json"), none));
  EXPECT_THROW(load_json(dir + "missing.json"), ConfigError);
}

TEST(RenderCompare, AcneOnlyWithoutBiasOrMoments) {
  AcneSceneOptions o;
  o.occluder = false;
  o.resolution = 64;
  const ShadowComparison c = compare_shadows(make_acne_scene(o), 0.01);
  EXPECT_GT(c.covered, 0);
  EXPECT_GT(c.dark_classic, 0);
  EXPECT_EQ(c.dark_biased, 0);
  EXPECT_EQ(c.dark_variance, 0);
}

TEST(RenderCompare, PenumbraWidensWithTheKernel) {
  const std::vector<int> w = penumbra_widths({1, 5, 15}, 64);
  EXPECT_LT(w[0], w[1]);
  EXPECT_LT(w[1], w[2]);
}

}  // namespace
}  // namespace umbra
