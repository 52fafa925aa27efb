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

#include "umbra/experiments/gradcheck.hpp"

#include "umbra/core/rng.hpp"
#include "umbra/experiments/scenes.hpp"
#include "umbra/scene/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace umbra {

namespace {

// Derivatives below this are treated as zero when classifying samples.
constexpr double kZero = 1e-10;

Binding whole(BindingKind kind, int target) {
  Binding b;
  b.kind = kind;
  b.target = target;
  return b;
}

Scene make_gradcheck_scene(const GradcheckConfig& config) {
  Scene scene;
  MeshInstance wall;
  wall.name = "wall";
  wall.mesh = make_plane(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 1.5, 1.5, 2);
  wall.pivot = wall.mesh.centroid();
  scene.meshes.push_back(std::move(wall));

  MeshInstance ball;
  ball.name = "ball";
  ball.mesh = make_icosphere(Vec3(0.25, 0.15, 0.6), 0.35, 1);
  ball.pivot = ball.mesh.centroid();
  ball.albedo = Vec3(0.8, 0.6, 0.5);
  scene.meshes.push_back(std::move(ball));

  MeshInstance box;
  box.name = "box";
  box.mesh = make_box(Vec3(-0.55, -0.35, 0.45), Vec3(0.18, 0.15, 0.2));
  box.pivot = box.mesh.centroid();
  box.albedo = Vec3(0.5, 0.7, 0.9);
  scene.meshes.push_back(std::move(box));

  LightSource sun;
  sun.kind = LightKind::kDirectional;
  sun.direction = Vec3(0.3, 0.25, -1.0);
  sun.intensity = Vec3(0.6, 0.6, 0.55);
  sun.shadow_resolution = config.shadow_resolution;
  sun.kernel = config.kernel;
  scene.lights.push_back(sun);

  LightSource spot;
  spot.kind = LightKind::kSpot;
  spot.position = Vec3(-1.4, 1.1, 2.6);
  spot.direction = Vec3(0.1, -0.1, 0.0) - spot.position;
  spot.fov = radians(60.0);
  spot.near = 1.0;
  spot.far = 6.0;
  spot.intensity = Vec3(0.5, 0.45, 0.4);
  spot.shadow_resolution = config.shadow_resolution;
  spot.kernel = config.kernel;
  scene.lights.push_back(spot);

  Camera camera;
  camera.kind = ProjectionKind::kPerspective;
  camera.eye = Vec3(0.3, -0.5, 3.4);
  camera.target = Vec3(0.0, 0.0, 0.2);
  camera.fov_y = radians(45.0);
  camera.near = 0.5;
  camera.far = 8.0;
  camera.width = camera.height = config.resolution;
  scene.cameras.push_back(camera);

  scene.settings.antialias = config.antialias;
  scene.settings.smooth_normals = config.smooth_normals;
  scene.fit_directional_lights();

  Binding vertices;
  vertices.kind = BindingKind::kVertices;
  vertices.target = 1;
  vertices.vertices.resize(scene.meshes[1].mesh.vertex_count());
  std::iota(vertices.vertices.begin(), vertices.vertices.end(), 0);
  scene.bind(vertices);
  scene.bind(whole(BindingKind::kPose, 2));
  scene.bind(whole(BindingKind::kLightDirection, 0));
  scene.bind(whole(BindingKind::kLightIntensity, 0));
  scene.bind(whole(BindingKind::kLightPosition, kGradcheckSpotLight));
  return scene;
}

void classify(const FdEntry& e, double tolerance, CheckRow& row) {
  if (e.excluded) {
    ++row.excluded;
    return;
  }
  if (std::max(std::abs(e.analytic), std::abs(e.numeric)) <= kZero) {
    ++row.trivial;
    return;
  }
  ++row.accepted;
  row.max_rel_error = std::max(row.max_rel_error, e.rel_error);
  if (e.rel_error > tolerance) ++row.failed;
}

// Input indices with a nonzero adjoint under random output weights.
std::vector<std::size_t> active_inputs(const Stage<RenderContext>& stage, RenderContext& ctx, Rng& rng) {
  Pipeline<RenderContext>::zero(stage.input_adjoints(ctx));
  for (std::span<double> s : stage.output_adjoints(ctx)) {
    for (double& v : s) v = rng.uniform(-1.0, 1.0);
  }
  stage.backward(ctx);
  std::vector<std::size_t> out;
  std::size_t k = 0;
  for (std::span<double> s : stage.input_adjoints(ctx)) {
    for (double v : s) {
      if (std::abs(v) > kZero) out.push_back(k);
      ++k;
    }
  }
  return out;
}

FdEntry refined_stage_check(const Stage<RenderContext>& stage, RenderContext& ctx, std::size_t index, double h,
                            double tolerance, Rng& rng, CheckRow& row) {
  const Rng start = rng;
  Rng local = start;
  FdEntry e = stage_fd_check(stage, ctx, index, h, local, 1e-6);
  for (int r = 0; r < 2 && !e.excluded && e.rel_error > tolerance; ++r) {
    h *= 0.1;
    local = start;
    const FdEntry f = stage_fd_check(stage, ctx, index, h, local, 1e-6);
    if (f.excluded || relative_error(e.numeric, f.numeric, 1e-6) <= tolerance) break;
    e = f;
    ++row.refined;
  }
  rng = local;
  return e;
}

}  // namespace

Renderer make_gradcheck_renderer(const GradcheckConfig& config) {
  Scene scene = make_gradcheck_scene(config);
  Renderer reference(scene);
  std::vector<double> target = reference.initial_parameters();
  Rng rng(config.seed);
  for (double& v : target) v += rng.uniform(-0.03, 0.03);
  reference.forward(target);
  ViewLoss loss;
  loss.camera = 0;
  loss.reference = reference.image(0);
  return Renderer(std::move(scene), {loss}, RegularizerSpec{1, 0.1});
}

GradcheckReport run_gradcheck(const GradcheckConfig& config) {
  Renderer renderer = make_gradcheck_renderer(config);
  RenderContext& ctx = renderer.context();
  const Pipeline<RenderContext>& pipeline = renderer.pipeline();
  Rng rng(config.seed * 7717 + 3);
  GradcheckReport report;

  StageTape tape = pipeline.forward(ctx);
  pipeline.backward(ctx, tape);
  for (const Stage<RenderContext>& stage : pipeline.stages()) {
    CheckRow row;
    row.name = stage.name;
    const std::size_t n = detail::flat_size(stage.inputs(ctx));
    const std::vector<std::size_t> active = active_inputs(stage, ctx, rng);
    for (int attempt = 0; attempt < config.max_attempts && row.accepted < config.samples && n > 0; ++attempt) {
      const std::size_t index = active.empty() ? static_cast<std::size_t>(rng.index(static_cast<int>(n)))
                                               : active[rng.index(static_cast<int>(active.size()))];
      const double x = detail::flat_at(stage.inputs(ctx), index);
      const double h = config.h * std::max(1.0, std::abs(x));
      classify(refined_stage_check(stage, ctx, index, h, config.tolerance, rng, row), config.tolerance, row);
      if (active.empty() && row.trivial >= config.samples) break;
    }
    report.stages.push_back(row);
  }

  CheckRow& e2e = report.end_to_end;
  e2e.name = "end-to-end";
  const int n = static_cast<int>(ctx.params.size());
  for (int attempt = 0; attempt < config.max_attempts && e2e.accepted < config.samples; attempt += 20) {
    std::vector<int> indices(20);
    for (int& i : indices) i = rng.index(n);
    for (const FdEntry& e : fd_check(pipeline, ctx, indices, config.h, 1e-6)) classify(e, config.tolerance, e2e);
  }

  report.pass = e2e.pass(config.samples);
  for (const CheckRow& row : report.stages) {
    // Stages without any active input (e.g. a constant loss term) pass on
    // their trivial samples alone.
    if (row.failed > 0 || (row.accepted < config.samples && row.trivial < config.samples)) report.pass = false;
  }
  return report;
}

Image visibility_gradient_image(Renderer& renderer, int camera, int light, int index) {
  RenderContext& ctx = renderer.context();
  const Pipeline<RenderContext>& pipeline = renderer.pipeline();
  const StageTape tape = pipeline.forward(ctx);
  const RasterOutput& raster = ctx.views.at(camera).raster;
  Image out(raster.width, raster.height, 1, 0.0);
  for (int p = 0; p < raster.pixel_count(); ++p) {
    if (!raster.covered(p)) continue;
    StageTape t = tape;
    pipeline.backward(ctx, t, [&](RenderContext& c) { c.views[camera].visibility_bar[light](p) = 1.0; });
    out(p) = ctx.grad.at(index);
  }
  return out;
}

BandStats gradient_band_stats(const Image& gradient, const Image& visibility, int dilate, double relative_threshold) {
  const int w = visibility.width(), h = visibility.height();
  std::vector<char> band(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = visibility.at(x, y);
      if (!(v > 0.02 && v < 0.98)) continue;
      for (int dy = -dilate; dy <= dilate; ++dy) {
        for (int dx = -dilate; dx <= dilate; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx >= 0 && xx < w && yy >= 0 && yy < h) band[yy * w + xx] = 1;
        }
      }
    }
  }
  double peak = 0.0;
  for (double g : gradient.values()) peak = std::max(peak, std::abs(g));
  BandStats s;
  int inside = 0, band_hit = 0;
  for (int p = 0; p < w * h; ++p) {
    const bool nz = peak > 0.0 && std::abs(gradient(p)) > relative_threshold * peak;
    if (band[p]) ++s.band;
    if (nz) ++s.nonzero;
    if (nz && band[p]) {
      ++inside;
      ++band_hit;
    }
  }
  s.nonzero_in_band = s.nonzero == 0 ? 0.0 : static_cast<double>(inside) / s.nonzero;
  s.band_covered = s.band == 0 ? 0.0 : static_cast<double>(band_hit) / s.band;
  return s;
}

AntialiasDiagnostic antialias_diagnostic(int kernel_size) {
  AntialiasDiagnostic out;
  for (bool aa : {true, false}) {
    MinimalPlaneOptions o;
    o.kernel = FilterKernel{FilterKernel::Shape::kBox, kernel_size};
    o.antialias = aa;
    Scene scene = make_minimal_plane_scene(o);
    Binding b = whole(BindingKind::kTranslation, kMinimalPlaneOccluder);
    b.axes = {0, 1};
    scene.bind(b);
    Renderer reference(scene);
    reference.render();
    ViewLoss loss;
    loss.reference = reference.image(0);
    Renderer renderer(std::move(scene), {loss});
    std::vector<double> grad;
    renderer.evaluate(std::vector<double>{0.03, -0.02}, grad);
    (aa ? out.with_antialias : out.without_antialias) = Vec2(grad[0], grad[1]);
  }
  return out;
}

}  // namespace umbra
