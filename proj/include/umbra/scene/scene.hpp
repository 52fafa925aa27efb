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

#pragma once

#include "umbra/scene/camera.hpp"
#include "umbra/scene/light.hpp"
#include "umbra/scene/mesh.hpp"

#include <span>
#include <string>
#include <vector>

namespace umbra {

// Translation parallel to the receiver plane (x, y) and rotation phi about
// the object's up axis (+y) through its pivot.
struct RigidPose2p5D {
  double tx = 0.0;
  double ty = 0.0;
  double phi = 0.0;
};

Mat3 rotation_y(double phi);
Mat3 rotation_y_derivative(double phi);

// Rotates about the +y axis through `pivot`, then translates by (tx, ty, 0).
Vec3 apply_pose(const Vec3& p, const RigidPose2p5D& pose, const Vec3& pivot);
TriangleMesh apply_pose(const TriangleMesh& mesh, const RigidPose2p5D& pose, const Vec3& pivot);
// Pivot defaults to the vertex centroid.
TriangleMesh apply_pose(const TriangleMesh& mesh, const RigidPose2p5D& pose);

struct MeshInstance {
  std::string name;
  TriangleMesh mesh;         // rest positions
  Vec3 albedo = Vec3::Ones();  // used when the mesh has no per-vertex albedo
  Vec3 pivot = Vec3::Zero();   // fixed rotation center, the rest centroid by default
  RigidPose2p5D pose;
  Vec3 translation = Vec3::Zero();

  Vec3 world_position(int vertex) const;
};

struct RenderSettings {
  bool antialias = true;         // smooth the shadow maps before filtering
  bool camera_antialias = true;  // smooth the final camera image
  bool shadows = true;
  bool smooth_normals = false;
  Vec3 background = Vec3::Zero();
  double variance_floor = 1e-6;
};

enum class BindingKind { kVertices, kTranslation, kPose, kLightDirection, kLightPosition, kLightIntensity };

// A slice of the parameter vector. `target` is a mesh index for mesh
// bindings and a light index otherwise; `axes` lists the components bound
// (pose components are 0 = tx, 1 = ty, 2 = phi).
struct Binding {
  BindingKind kind = BindingKind::kVertices;
  int target = 0;
  std::vector<int> vertices;
  std::vector<int> axes = {0, 1, 2};
  int offset = 0;

  int size() const;
};

std::string to_string(BindingKind kind);
BindingKind parse_binding_kind(const std::string& name);

struct Scene;

// Adjoints of every bindable scene quantity.
struct SceneAdjoint {
  struct MeshPart {
    std::vector<Vec3> vertices;
    Vec3 translation = Vec3::Zero();
    Vec3 pose = Vec3::Zero();  // tx, ty, phi
  };
  struct LightPart {
    Vec3 direction = Vec3::Zero();
    Vec3 position = Vec3::Zero();
    Vec3 intensity = Vec3::Zero();
  };
  std::vector<MeshPart> meshes;
  std::vector<LightPart> lights;

  void reset(const Scene& scene);
};

class ParameterTable {
 public:
  // Appends a binding at the end of the vector; throws ConfigError when any
  // bound scalar is already bound or out of range for `scene`.
  void add(const Scene& scene, Binding binding);
  void clear();

  int size() const { return size_; }
  const std::vector<Binding>& bindings() const { return bindings_; }
  // Offset of the first binding of `kind` on `target`; throws ConfigError.
  int offset_of(BindingKind kind, int target) const;

  std::vector<double> gather(const Scene& scene) const;
  void scatter(Scene& scene, std::span<const double> values) const;
  void gather_adjoint(const SceneAdjoint& adjoint, std::span<double> grad) const;

 private:
  std::vector<Binding> bindings_;
  std::vector<std::array<int, 4>> keys_;  // sorted (kind, target, vertex, axis)
  int size_ = 0;
};

// Concatenation of every instance into one indexed triangle list.
struct WorldLayout {
  std::vector<int> vertex_offset;  // per instance, plus the total at the end
  std::vector<int> face_offset;
  std::vector<Face> faces;         // global vertex indices
  std::vector<Vec3> albedo;        // per global vertex
};

struct Scene {
  std::vector<MeshInstance> meshes;
  std::vector<LightSource> lights;
  std::vector<Camera> cameras;
  RenderSettings settings;
  ParameterTable parameters;

  int mesh_index(const std::string& name) const;
  void validate() const;

  WorldLayout layout() const;
  std::vector<Vec3> world_positions() const;

  // Fits every directional light's frustum to the scene's bounding sphere
  // scaled by `margin`, at the current parameter values.
  void fit_directional_lights(double margin = 1.05);

  const Binding& bind(Binding binding);
};

}  // namespace umbra
