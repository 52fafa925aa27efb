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

#include "umbra/scene/scene.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace umbra {

Mat3 rotation_y(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Mat3 r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

Mat3 rotation_y_derivative(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Mat3 r;
  r << -s, 0, c, 0, 0, 0, -c, 0, -s;
  return r;
}

Vec3 apply_pose(const Vec3& p, const RigidPose2p5D& pose, const Vec3& pivot) {
  return rotation_y(pose.phi) * (p - pivot) + pivot + Vec3(pose.tx, pose.ty, 0.0);
}

TriangleMesh apply_pose(const TriangleMesh& mesh, const RigidPose2p5D& pose, const Vec3& pivot) {
  TriangleMesh out = mesh;
  for (Vec3& p : out.positions) p = apply_pose(p, pose, pivot);
  return out;
}

TriangleMesh apply_pose(const TriangleMesh& mesh, const RigidPose2p5D& pose) {
  return apply_pose(mesh, pose, mesh.centroid());
}

Vec3 MeshInstance::world_position(int vertex) const {
  return apply_pose(mesh.positions[vertex], pose, pivot) + translation;
}

int Binding::size() const {
  const int n = static_cast<int>(axes.size());
  return kind == BindingKind::kVertices ? n * static_cast<int>(vertices.size()) : n;
}

std::string to_string(BindingKind kind) {
  switch (kind) {
    case BindingKind::kVertices: return "vertices";
    case BindingKind::kTranslation: return "translation";
    case BindingKind::kPose: return "pose";
    case BindingKind::kLightDirection: return "light_direction";
    case BindingKind::kLightPosition: return "light_position";
    case BindingKind::kLightIntensity: return "light_intensity";
  }
  return "unknown";
}

BindingKind parse_binding_kind(const std::string& name) {
  for (BindingKind k : {BindingKind::kVertices, BindingKind::kTranslation, BindingKind::kPose,
                        BindingKind::kLightDirection, BindingKind::kLightPosition, BindingKind::kLightIntensity}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown binding kind '{}'", name));
}

void SceneAdjoint::reset(const Scene& scene) {
  meshes.resize(scene.meshes.size());
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    meshes[i].vertices.assign(scene.meshes[i].mesh.positions.size(), Vec3::Zero());
    meshes[i].translation.setZero();
    meshes[i].pose.setZero();
  }
  lights.assign(scene.lights.size(), LightPart{});
}

namespace {

bool is_mesh_binding(BindingKind k) {
  return k == BindingKind::kVertices || k == BindingKind::kTranslation || k == BindingKind::kPose;
}

// Visits every scalar of a binding in vector order with a reference to the
// scene value it is bound to.
template <typename SceneT, typename Fn>
void for_each_scalar(SceneT& scene, const Binding& b, Fn&& fn) {
  int slot = b.offset;
  switch (b.kind) {
    case BindingKind::kVertices: {
      auto& positions = scene.meshes[b.target].mesh.positions;
      for (int v : b.vertices) {
        for (int a : b.axes) fn(slot++, positions[v][a]);
      }
      break;
    }
    case BindingKind::kTranslation:
      for (int a : b.axes) fn(slot++, scene.meshes[b.target].translation[a]);
      break;
    case BindingKind::kPose: {
      auto& pose = scene.meshes[b.target].pose;
      for (int a : b.axes) fn(slot++, a == 0 ? pose.tx : (a == 1 ? pose.ty : pose.phi));
      break;
    }
    case BindingKind::kLightDirection:
      for (int a : b.axes) fn(slot++, scene.lights[b.target].direction[a]);
      break;
    case BindingKind::kLightPosition:
      for (int a : b.axes) fn(slot++, scene.lights[b.target].position[a]);
      break;
    case BindingKind::kLightIntensity:
      for (int a : b.axes) fn(slot++, scene.lights[b.target].intensity[a]);
      break;
  }
}

}  // namespace

void ParameterTable::add(const Scene& scene, Binding binding) {
  const int k = static_cast<int>(binding.kind);
  const int count = is_mesh_binding(binding.kind) ? static_cast<int>(scene.meshes.size())
                                                   : static_cast<int>(scene.lights.size());
  if (binding.target < 0 || binding.target >= count) {
    throw ConfigError(fmt::format("{} binding targets index {} out of range", to_string(binding.kind), binding.target));
  }
  for (int a : binding.axes) {
    if (a < 0 || a > 2) throw ConfigError(fmt::format("binding axis {} out of range", a));
  }
  if (binding.kind == BindingKind::kLightPosition && scene.lights[binding.target].kind != LightKind::kSpot) {
    throw ConfigError("light_position binding requires a spot light");
  }
  std::vector<std::array<int, 4>> keys;
  if (binding.kind == BindingKind::kVertices) {
    const int n = scene.meshes[binding.target].mesh.vertex_count();
    for (int v : binding.vertices) {
      if (v < 0 || v >= n) throw ConfigError(fmt::format("bound vertex {} out of range", v));
      for (int a : binding.axes) keys.push_back({k, binding.target, v, a});
    }
  } else {
    for (int a : binding.axes) keys.push_back({k, binding.target, -1, a});
  }
  std::vector<std::array<int, 4>> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError(fmt::format("{} binding repeats a scalar", to_string(binding.kind)));
  }
  for (const auto& key : sorted) {
    if (std::binary_search(keys_.begin(), keys_.end(), key)) {
      throw ConfigError(fmt::format("{} binding overlaps an existing binding", to_string(binding.kind)));
    }
  }
  keys_.insert(keys_.end(), sorted.begin(), sorted.end());
  std::sort(keys_.begin(), keys_.end());
  binding.offset = size_;
  size_ += binding.size();
  bindings_.push_back(std::move(binding));
}

void ParameterTable::clear() {
  bindings_.clear();
  keys_.clear();
  size_ = 0;
}

int ParameterTable::offset_of(BindingKind kind, int target) const {
  for (const Binding& b : bindings_) {
    if (b.kind == kind && b.target == target) return b.offset;
  }
  throw ConfigError(fmt::format("no {} binding for target {}", to_string(kind), target));
}

std::vector<double> ParameterTable::gather(const Scene& scene) const {
  std::vector<double> values(size_);
  for (const Binding& b : bindings_) {
    for_each_scalar(scene, b, [&](int slot, const double& v) { values[slot] = v; });
  }
  return values;
}

void ParameterTable::scatter(Scene& scene, std::span<const double> values) const {
  if (static_cast<int>(values.size()) != size_) {
    throw ConfigError(fmt::format("parameter vector has {} entries, bindings need {}", values.size(), size_));
  }
  for (const Binding& b : bindings_) {
    for_each_scalar(scene, b, [&](int slot, double& v) { v = values[slot]; });
  }
}

void ParameterTable::gather_adjoint(const SceneAdjoint& adjoint, std::span<double> grad) const {
  for (const Binding& b : bindings_) {
    int slot = b.offset;
    switch (b.kind) {
      case BindingKind::kVertices:
        for (int v : b.vertices) {
          for (int a : b.axes) grad[slot++] += adjoint.meshes[b.target].vertices[v][a];
        }
        break;
      case BindingKind::kTranslation:
        for (int a : b.axes) grad[slot++] += adjoint.meshes[b.target].translation[a];
        break;
      case BindingKind::kPose:
        for (int a : b.axes) grad[slot++] += adjoint.meshes[b.target].pose[a];
        break;
      case BindingKind::kLightDirection:
        for (int a : b.axes) grad[slot++] += adjoint.lights[b.target].direction[a];
        break;
      case BindingKind::kLightPosition:
        for (int a : b.axes) grad[slot++] += adjoint.lights[b.target].position[a];
        break;
      case BindingKind::kLightIntensity:
        for (int a : b.axes) grad[slot++] += adjoint.lights[b.target].intensity[a];
        break;
    }
  }
}

int Scene::mesh_index(const std::string& name) const {
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    if (meshes[i].name == name) return static_cast<int>(i);
  }
  throw ConfigError(fmt::format("unknown mesh '{}'", name));
}

void Scene::validate() const {
  for (const MeshInstance& m : meshes) m.mesh.validate();
  for (const LightSource& l : lights) l.validate();
  for (const Camera& c : cameras) c.validate();
}

WorldLayout Scene::layout() const {
  WorldLayout w;
  int v = 0, f = 0;
  for (const MeshInstance& m : meshes) {
    w.vertex_offset.push_back(v);
    w.face_offset.push_back(f);
    for (const Face& face : m.mesh.faces) w.faces.push_back({face[0] + v, face[1] + v, face[2] + v});
    for (int i = 0; i < m.mesh.vertex_count(); ++i) {
      w.albedo.push_back(m.mesh.albedo.empty() ? m.albedo : m.mesh.albedo[i]);
    }
    v += m.mesh.vertex_count();
    f += m.mesh.face_count();
  }
  w.vertex_offset.push_back(v);
  w.face_offset.push_back(f);
  return w;
}

std::vector<Vec3> Scene::world_positions() const {
  std::vector<Vec3> out;
  for (const MeshInstance& m : meshes) {
    for (int i = 0; i < m.mesh.vertex_count(); ++i) out.push_back(m.world_position(i));
  }
  return out;
}

void Scene::fit_directional_lights(double margin) {
  const std::vector<Vec3> points = world_positions();
  Sphere s = bounding_sphere(points);
  s.radius = std::max(s.radius, 1e-6) * margin;
  for (LightSource& l : lights) {
    if (l.kind == LightKind::kDirectional) l.fit = s;
  }
}

const Binding& Scene::bind(Binding binding) {
  parameters.add(*this, std::move(binding));
  return parameters.bindings().back();
}

}  // namespace umbra
