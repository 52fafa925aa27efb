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

#include "umbra/autodiff/pipeline.hpp"
#include "umbra/experiments/gradcheck.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <limits>

namespace umbra {
namespace {

struct ToyCtx : ContextBase {
  std::vector<double> y, y_bar;
};

// y = params (identity), loss = sum of f(y_i) with f given.
Pipeline<ToyCtx> toy_pipeline(std::function<double(double)> f, std::function<double(double)> df) {
  Pipeline<ToyCtx> p;
  Stage<ToyCtx> id;
  id.name = "identity";
  id.forward = [](ToyCtx& c) { c.y = c.params; };
  id.backward = [](ToyCtx& c) {
    for (std::size_t i = 0; i < c.grad.size(); ++i) c.grad[i] += c.y_bar[i];
  };
  id.inputs = [](ToyCtx& c) { return Spans{c.params}; };
  id.outputs = [](ToyCtx& c) { return Spans{c.y}; };
  id.input_adjoints = [](ToyCtx& c) { return Spans{c.grad}; };
  id.output_adjoints = [](ToyCtx& c) {
    c.y_bar.resize(c.y.size());
    return Spans{c.y_bar};
  };
  p.add(id);
  Stage<ToyCtx> loss;
  loss.name = "loss";
  loss.forward = [f](ToyCtx& c) {
    c.loss = 0.0;
    for (double v : c.y) c.loss += f(v);
  };
  loss.backward = [df](ToyCtx& c) {
    c.y_bar.resize(c.y.size());
    for (std::size_t i = 0; i < c.y.size(); ++i) c.y_bar[i] += c.loss_bar * df(c.y[i]);
  };
  loss.inputs = [](ToyCtx& c) { return Spans{c.y}; };
  loss.outputs = [](ToyCtx& c) { return Spans{std::span<double>(&c.loss, 1)}; };
  loss.input_adjoints = [](ToyCtx& c) {
    c.y_bar.resize(c.y.size());
    return Spans{c.y_bar};
  };
  loss.output_adjoints = [](ToyCtx& c) { return Spans{std::span<double>(&c.loss_bar, 1)}; };
  p.add(loss);
  return p;
}

Pipeline<ToyCtx> sum_pipeline() {
  return toy_pipeline([](double v) { return v; }, [](double) { return 1.0; });
}

TEST(Pipeline, IdentityStageSumLoss) {
  const Pipeline<ToyCtx> p = sum_pipeline();
  ToyCtx c;
  c.params = {1.0, 2.0};
  StageTape tape = p.forward(c);
  EXPECT_EQ(c.loss, 3.0);
  EXPECT_EQ(tape.executed, (std::vector<int>{0, 1}));
  p.backward(c, tape);
  EXPECT_EQ(c.grad, (std::vector<double>{1.0, 1.0}));
  EXPECT_TRUE(tape.executed.empty());
}

TEST(Pipeline, EmptyParameterVector) {
  const Pipeline<ToyCtx> p = sum_pipeline();
  ToyCtx c;
  StageTape tape = p.forward(c);
  EXPECT_EQ(c.loss, 0.0);
  EXPECT_EQ(tape.executed.size(), 2u);
  p.backward(c, tape);
  EXPECT_TRUE(c.grad.empty());
}

TEST(Pipeline, SquareHasGradientSix) {
  const Pipeline<ToyCtx> p = toy_pipeline([](double v) { return v * v; }, [](double v) { return 2.0 * v; });
  ToyCtx c;
  c.params = {3.0};
  StageTape tape = p.forward(c);
  p.backward(c, tape);
  EXPECT_EQ(c.loss, 9.0);
  EXPECT_EQ(c.grad[0], 6.0);
}

TEST(Pipeline, ConstantLossHasZeroGradient) {
  const Pipeline<ToyCtx> p = toy_pipeline([](double) { return 4.0; }, [](double) { return 0.0; });
  ToyCtx c;
  c.params = {1.0, -2.0, 5.0};
  StageTape tape = p.forward(c);
  p.backward(c, tape);
  EXPECT_EQ(c.grad, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(Pipeline, GradientIsZeroedBeforeEachBackward) {
  const Pipeline<ToyCtx> p = sum_pipeline();
  ToyCtx c;
  c.params = {1.0, 2.0};
  for (int i = 0; i < 3; ++i) {
    StageTape tape = p.forward(c);
    p.backward(c, tape);
    EXPECT_EQ(c.grad, (std::vector<double>{1.0, 1.0}));
  }
}

TEST(Pipeline, StaleConsumedAndMismatchedTapesThrow) {
  const Pipeline<ToyCtx> p = sum_pipeline();
  ToyCtx c;
  c.params = {1.0, 2.0};
  StageTape old = p.forward(c);
  StageTape fresh = p.forward(c);
  EXPECT_THROW(p.backward(c, old), PipelineError);
  p.backward(c, fresh);
  EXPECT_THROW(p.backward(c, fresh), PipelineError);
  StageTape tape = p.forward(c);
  c.params.push_back(3.0);
  EXPECT_THROW(p.backward(c, tape), PipelineError);
}

TEST(Pipeline, NonFiniteIntermediateNamesTheStage) {
  const Pipeline<ToyCtx> p = sum_pipeline();
  ToyCtx c;
  c.params = {1.0, std::numeric_limits<double>::infinity()};
  try {
    p.forward(c);
    FAIL() << "expected a PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_NE(std::string(e.what()).find("identity"), std::string::npos);
  }
}

TEST(FdCheck, QuadraticIsExact) {
  const Pipeline<ToyCtx> p =
      toy_pipeline([](double v) { return 0.5 * v * v - 3.0 * v; }, [](double v) { return v - 3.0; });
  ToyCtx c;
  c.params = {0.3, -1.7, 2.5, 10.0};
  const std::vector<int> idx = {0, 1, 2, 3};
  for (const FdEntry& e : fd_check(p, c, idx, 1e-3)) {
    EXPECT_FALSE(e.excluded);
    EXPECT_LT(e.rel_error, 1e-6) << e.index;
  }
}

TEST(FdCheck, StageCheckOnToyStage) {
  const Pipeline<ToyCtx> p = toy_pipeline([](double v) { return std::sin(v); }, [](double v) { return std::cos(v); });
  ToyCtx c;
  c.params = {0.3, 1.2};
  StageTape tape = p.forward(c);
  (void)tape;
  Rng rng(2);
  for (std::size_t i = 0; i < 2; ++i) {
    const FdEntry e = stage_fd_check(p.stages()[1], c, i, 1e-4, rng);
    EXPECT_LT(e.rel_error, 1e-6);
  }
}

TEST(FdCheck, SilhouetteOnAPixelCenterIsExcluded) {
  // Moves the occluder so one of its edges passes exactly through a shadow
  // map texel center; any +-h step then flips that texel's coverage.
  Scene scene = testing::bound_minimal_plane();
  Renderer probe(scene);
  probe.render();
  const ProjectionFrame& light = probe.context().lights[0].projection;
  const Vec3 corner = probe.world_positions(kMinimalPlaneOccluder)[0];
  const double sx = light.project(corner).sx;
  const double dsx = light.project(corner + Vec3::UnitX()).sx - sx;
  scene.meshes[kMinimalPlaneOccluder].translation.x() += (std::floor(sx) + 0.5 - sx) / dsx;

  Renderer r(scene);
  r.render();
  Renderer ref = testing::with_reference(scene, r.image(0));
  const std::vector<int> idx = {0};
  const std::vector<FdEntry> e = fd_check(ref.pipeline(), ref.context(), idx, 1e-4);
  EXPECT_TRUE(e[0].excluded);
}

TEST(RenderPipeline, MinimalPlaneLossIsFinite) {
  Scene scene = testing::bound_minimal_plane();
  Renderer r(scene);
  r.render();
  Image ref = r.image(0);
  for (double& v : ref.values()) v *= 0.9;
  Renderer withloss = testing::with_reference(scene, ref);
  std::vector<double> g;
  const double loss = withloss.evaluate(withloss.initial_parameters(), g);
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_GT(loss, 0.0);
  for (double v : g) EXPECT_TRUE(std::isfinite(v));
}

TEST(RenderPipeline, BackwardIsBitwiseDeterministic) {
  GradcheckConfig config;
  config.resolution = 40;
  config.shadow_resolution = 40;
  Renderer r = make_gradcheck_renderer(config);
  const std::vector<double> p = r.initial_parameters();
  std::vector<double> g1, g2;
  const double l1 = r.evaluate(p, g1);
  const double l2 = r.evaluate(p, g2);
  EXPECT_EQ(l1, l2);
  EXPECT_EQ(g1, g2);
  // Two backward passes over copies of one tape.
  StageTape tape = r.pipeline().forward(r.context());
  StageTape copy = tape;
  r.pipeline().backward(r.context(), tape);
  const std::vector<double> g3 = r.context().grad;
  r.pipeline().backward(r.context(), copy);
  EXPECT_EQ(g3, r.context().grad);
}

TEST(RenderPipeline, BackwardIsLinearInTheLoss) {
  GradcheckConfig config;
  config.resolution = 40;
  config.shadow_resolution = 40;
  Renderer base = make_gradcheck_renderer(config);
  const std::vector<double> p = base.initial_parameters();
  Rng rng(9);
  const Image ref1 = testing::random_image(40, 40, 3, rng);
  const Image ref2 = testing::random_image(40, 40, 3, rng);
  auto gradient = [&](double a, double b) {
    std::vector<ViewLoss> losses;
    if (a != 0.0) losses.push_back({0, ref1, {}, a});
    if (b != 0.0) losses.push_back({0, ref2, {}, b});
    Renderer r(base.base_scene(), losses);
    std::vector<double> g;
    r.evaluate(p, g);
    return g;
  };
  const double a = 0.7, b = -1.9;
  const std::vector<double> g1 = gradient(1.0, 0.0), g2 = gradient(0.0, 1.0), g = gradient(a, b);
  const double scale = testing::max_abs(g);
  ASSERT_GT(scale, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], a * g1[i] + b * g2[i], 1e-12 * scale) << i;
}

TEST(RenderPipeline, GradcheckPassesOnAReducedSampleCount) {
  GradcheckConfig config;
  config.samples = 25;
  config.max_attempts = 500;
  const GradcheckReport report = run_gradcheck(config);
  for (const CheckRow& row : report.stages) EXPECT_TRUE(row.pass(config.samples)) << row.name;
  EXPECT_TRUE(report.end_to_end.pass(config.samples));
  EXPECT_TRUE(report.pass);
}

}  // namespace
}  // namespace umbra
