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

#include "umbra/experiments/shadow_art.hpp"

#include "umbra/scene/primitives.hpp"
#include "umbra/shade/shading.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace umbra {

TargetShape::Kind parse_target_kind(const std::string& name) {
  if (name == "disk") return TargetShape::Kind::kDisk;
  if (name == "square") return TargetShape::Kind::kSquare;
  if (name == "self") return TargetShape::Kind::kSelf;
  throw ConfigError("unknown target shape '" + name + "' (expected disk, square or self)");
}

namespace {

constexpr double kReceiverDistance = 1.5;
constexpr double kCameraDistance = 1.0;
constexpr double kCameraHalfExtent = 1.2;

struct ViewAxes {
  Vec3 travel;  // light direction
  Vec3 up;
};

ViewAxes view_axes(int view) {
  if (view == 0) return {Vec3(0.0, 0.0, -1.0), Vec3::UnitY()};
  return {Vec3(-1.0, 0.0, 0.0), Vec3::UnitY()};
}

}  // namespace

Scene make_shadow_art_scene(const ShadowArtConfig& config) {
  if (config.views < 1 || config.views > 2) throw ConfigError("shadow art supports 1 or 2 views");
  Scene scene;
  MeshInstance sphere;
  sphere.name = "sphere";
  sphere.mesh = make_uv_sphere(Vec3::Zero(), config.radius, config.segments, config.stacks);
  sphere.pivot = Vec3::Zero();
  scene.meshes.push_back(std::move(sphere));

  for (int v = 0; v < config.views; ++v) {
    const ViewAxes axes = view_axes(v);
    const Vec3 right = axes.travel.cross(axes.up).normalized();
    MeshInstance receiver;
    receiver.name = fmt::format("receiver{}", v);
    // The rasterizer does not clip, so an oblique camera needs a receiver
    // fine enough that the triangles behind it can be dropped whole.
    receiver.mesh = make_plane(axes.travel * kReceiverDistance, -right, axes.up, kReceiverDistance,
                               kReceiverDistance, config.oblique_camera ? 24 : 1);
    receiver.pivot = receiver.mesh.centroid();
    scene.meshes.push_back(std::move(receiver));

    LightSource light;
    light.kind = LightKind::kDirectional;
    light.direction = axes.travel;
    light.up_hint = axes.up;
    light.shadow_resolution = config.shadow_resolution;
    light.kernel = config.kernel;
    scene.lights.push_back(light);

    Camera camera;
    camera.kind = ProjectionKind::kOrthographic;
    camera.eye = axes.travel * kCameraDistance;
    camera.target = axes.travel * kReceiverDistance;
    camera.up = axes.up;
    camera.half_width = camera.half_height = kCameraHalfExtent;
    camera.near = 0.01;
    camera.far = 1.0;
    if (config.oblique_camera) {
      camera.kind = ProjectionKind::kPerspective;
      camera.eye = axes.travel * 0.9 + right * 0.7 + axes.up * 0.35;
      camera.fov_y = radians(70.0);
      camera.near = 0.05;
      camera.far = 3.0;
    }
    camera.width = camera.height = config.resolution;
    scene.cameras.push_back(camera);
  }
  scene.settings.antialias = config.antialias;
  // Pixels off the receiver read as lit, matching the target's default.
  scene.settings.background = Vec3::Ones();
  scene.fit_directional_lights();
  return scene;
}

Image shape_target(const Scene& scene, int view, const TargetShape& shape) {
  if (shape.kind == TargetShape::Kind::kSelf) {
    const Image img = render(scene, view);
    Image out(img.width(), img.height(), 1);
    for (int p = 0; p < img.pixel_count(); ++p) out(p) = img(p, 0);
    return out;
  }
  const GeometryBuffer g = gbuffer_pass(scene, view);
  const ViewAxes axes = view_axes(view);
  const Vec3 right = axes.travel.cross(axes.up).normalized();
  Image out(g.width, g.height, 1, 1.0);
  for (int p = 0; p < g.width * g.height; ++p) {
    if (!g.covered(p)) continue;
    const Vec3 x(g.position(p, 0), g.position(p, 1), g.position(p, 2));
    const double a = x.dot(right), b = x.dot(axes.up);
    const bool inside = shape.kind == TargetShape::Kind::kDisk
                            ? a * a + b * b <= shape.size * shape.size
                            : std::max(std::abs(a), std::abs(b)) <= shape.size;
    if (inside) out(p) = 0.0;
  }
  return out;
}

double shadow_iou(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw ConfigError("shadow_iou: size mismatch");
  long long inter = 0, uni = 0;
  for (int p = 0; p < a.pixel_count(); ++p) {
    const bool sa = a(p, 0) < 0.5, sb = b(p, 0) < 0.5;
    inter += sa && sb;
    uni += sa || sb;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

ShadowArtProblem::ShadowArtProblem(const ShadowArtConfig& config) : views_(config.views) {
  Scene scene = make_shadow_art_scene(config);
  width_ = scene.cameras[0].width;
  height_ = scene.cameras[0].height;
  faces_ = scene.meshes[0].mesh.faces;
  const int n = scene.meshes[0].mesh.vertex_count();
  precond_ = std::make_unique<LaplacianPreconditioner>(faces_, n, config.lambda);

  std::vector<ViewLoss> losses;
  for (int v = 0; v < views_; ++v) {
    const TargetShape shape = v < static_cast<int>(config.targets.size()) ? config.targets[v] : TargetShape{};
    ViewLoss loss;
    loss.camera = v;
    const Image gray = shape_target(scene, v, shape);
    loss.reference = Image(width_, height_, 3);
    for (int p = 0; p < gray.pixel_count(); ++p) {
      for (int c = 0; c < 3; ++c) loss.reference(p, c) = gray(p);
    }
    losses.push_back(std::move(loss));
  }

  Binding binding;
  binding.kind = BindingKind::kVertices;
  binding.target = 0;
  for (int i = 0; i < n; ++i) binding.vertices.push_back(i);
  scene.bind(binding);

  RegularizerSpec reg;
  reg.mesh = config.normal_weight != 0.0 ? 0 : -1;
  reg.weight = config.normal_weight;
  renderer_ = std::make_unique<Renderer>(std::move(scene), std::move(losses), reg);

  x_ = renderer_->initial_parameters();
  Eigen::Map<const Eigen::MatrixXd> x(x_.data(), 3, n);
  u0_.resize(x_.size());
  Eigen::Map<Eigen::MatrixXd> u(u0_.data(), 3, n);
  u = (precond_->system() * x.transpose()).transpose();
  // Self targets are rendered here at the round-tripped start, so the
  // initial image loss is exactly zero.
  bool rendered = false;
  for (int v = 0; v < views_; ++v) {
    if (v >= static_cast<int>(config.targets.size()) || config.targets[v].kind != TargetShape::Kind::kSelf) continue;
    if (!rendered) forward(u0_);
    rendered = true;
    set_target(v, shadow(v));
  }
}

std::vector<double> ShadowArtProblem::to_vertices(std::span<const double> u) const {
  std::vector<double> x(u.begin(), u.end());
  precond_->apply_inplace(x);
  return x;
}

double ShadowArtProblem::forward(std::span<const double> u) {
  x_ = to_vertices(u);
  return renderer_->forward(x_);
}

double ShadowArtProblem::evaluate(std::span<const double> u, std::vector<double>& grad) {
  x_ = to_vertices(u);
  const double loss = renderer_->evaluate(x_, gx_);
  grad = gx_;
  precond_->apply_inplace(grad);
  return loss;
}

void ShadowArtProblem::set_target(int view, const Image& gray) {
  if (view < 0 || view >= views_) throw ConfigError(fmt::format("target view {} out of range", view));
  if (gray.width() != width_ || gray.height() != height_) {
    throw ConfigError(fmt::format("target is {}x{}, expected {}x{}", gray.width(), gray.height(), width_, height_));
  }
  Image ref(width_, height_, 3);
  for (int p = 0; p < gray.pixel_count(); ++p) {
    for (int c = 0; c < 3; ++c) ref(p, c) = gray(p, 0);
  }
  renderer_->set_reference(view, std::move(ref));
}

Image ShadowArtProblem::target(int view) const {
  const Image& ref = renderer_->context().losses.at(view).reference;
  Image out(width_, height_, 1);
  for (int p = 0; p < out.pixel_count(); ++p) out(p) = ref(p, 0);
  return out;
}

Image ShadowArtProblem::shadow(int view) const {
  const Image& img = renderer_->image(view);
  Image out(img.width(), img.height(), 1);
  for (int p = 0; p < img.pixel_count(); ++p) out(p) = img(p, 0);
  return out;
}

std::vector<Vec3> ShadowArtProblem::positions(std::span<const double> u) const {
  const std::vector<double> x = to_vertices(u);
  std::vector<Vec3> out(x.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Vec3(x[3 * i], x[3 * i + 1], x[3 * i + 2]);
  return out;
}

TriangleMesh ShadowArtProblem::mesh(std::span<const double> u) const {
  TriangleMesh m;
  m.positions = positions(u);
  m.faces = faces_;
  return m;
}

ShadowArtResult run_shadow_art(const ShadowArtConfig& config, const RunOptions* overrides) {
  ShadowArtProblem problem(config);
  ShadowArtResult result;
  const std::vector<double> u0 = problem.initial_parameters();
  problem.forward(u0);
  for (int v = 0; v < problem.views(); ++v) {
    result.targets.push_back(problem.target(v));
    result.initial_iou.push_back(shadow_iou(problem.shadow(v), result.targets.back()));
  }
  RunOptions options = overrides ? *overrides : RunOptions{};
  if (!overrides) {
    options.iterations = config.iterations;
    options.optimizer = config.optimizer;
  }
  result.trace = run_optimization(
      [&](std::span<const double> u, std::vector<double>& g) { return problem.evaluate(u, g); }, u0, options);
  problem.forward(result.trace.final_params);
  for (int v = 0; v < problem.views(); ++v) {
    result.shadows.push_back(problem.shadow(v));
    result.iou.push_back(shadow_iou(result.shadows.back(), result.targets[v]));
  }
  result.mesh = problem.mesh(result.trace.final_params);
  return result;
}

}  // namespace umbra
