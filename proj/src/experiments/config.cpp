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

#include <fmt/format.h>

#include <fstream>
#include <set>

namespace umbra {

using nlohmann::json;

namespace {

// Typed access to the members of one JSON object; finish() rejects keys
// that were never read.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_null() && !j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where_));
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (j_.is_null() || !j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("{}.{}: {}", where_, key, e.what()));
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    if (j_.is_null() || !j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  void finish() const {
    if (j_.is_null()) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where_, key));
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_seed(Fields& f, std::uint64_t& seed, const CommonOverrides& o) {
  f.read("seed", seed);
  if (o.seed) seed = *o.seed;
}

void apply_kernel(Fields& f, FilterKernel& kernel, const CommonOverrides& o) {
  if (const json* k = f.child("kernel")) kernel = kernel_from_json(*k, kernel);
  if (o.kernel_shape) kernel.shape = *o.kernel_shape;
  if (o.kernel_size) kernel.size = *o.kernel_size;
  kernel.validate();
}

void apply_optimizer(Fields& f, OptimizerConfig& optimizer) {
  if (const json* j = f.child("optimizer")) optimizer = optimizer_from_json(*j, optimizer);
}

void apply_shadow_resolution(Fields& f, int& resolution, const CommonOverrides& o) {
  f.read("shadow_resolution", resolution);
  if (o.shadow_resolution) resolution = *o.shadow_resolution;
  if (resolution < 1) throw ConfigError("shadow_resolution must be positive");
}

void check_positive(int value, const char* name) {
  if (value < 1) throw ConfigError(fmt::format("{} must be positive", name));
}

void reject_no_shadows(const CommonOverrides& o, const char* command) {
  if (o.no_shadows) throw ConfigError(fmt::format("--no-shadows does not apply to {}", command));
}

MinimalPlaneOptions minimal_scene(Fields& f, MinimalPlaneOptions s, const CommonOverrides& o) {
  f.read("resolution", s.resolution);
  apply_shadow_resolution(f, s.shadow_resolution, o);
  apply_kernel(f, s.kernel, o);
  f.read("antialias", s.antialias);
  if (o.no_antialias) s.antialias = false;
  f.read("occluder_half", s.occluder_half);
  f.read("occluder_height", s.occluder_height);
  check_positive(s.resolution, "resolution");
  return s;
}

}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

OptimizerConfig optimizer_from_json(const json& j, OptimizerConfig base) {
  Fields f(j, "optimizer");
  std::string method = to_string(base.method);
  f.read("method", method);
  base.method = parse_method(method);
  f.read("step_size", base.step_size);
  f.read("beta1", base.beta1);
  f.read("beta2", base.beta2);
  f.read("epsilon", base.epsilon);
  f.read("uniform", base.uniform);
  f.finish();
  return base;
}

FilterKernel kernel_from_json(const json& j, FilterKernel base) {
  Fields f(j, "kernel");
  std::string shape = to_string(base.shape);
  f.read("shape", shape);
  base.shape = parse_kernel_shape(shape);
  f.read("size", base.size);
  f.finish();
  base.validate();
  return base;
}

GradcheckConfig gradcheck_config(const json& j, const CommonOverrides& o) {
  reject_no_shadows(o, "gradcheck");
  GradcheckConfig c;
  Fields f(j, "gradcheck");
  f.read("resolution", c.resolution);
  apply_shadow_resolution(f, c.shadow_resolution, o);
  apply_kernel(f, c.kernel, o);
  f.read("antialias", c.antialias);
  if (o.no_antialias) c.antialias = false;
  f.read("smooth_normals", c.smooth_normals);
  f.read("samples", c.samples);
  f.read("max_attempts", c.max_attempts);
  f.read("h", c.h);
  f.read("tolerance", c.tolerance);
  read_seed(f, c.seed, o);
  f.finish();
  check_positive(c.resolution, "resolution");
  if (!(c.h > 0.0)) throw ConfigError("h must be positive");
  return c;
}

MinimalPlaneConfig minimal_plane_config(const json& j, const CommonOverrides& o) {
  reject_no_shadows(o, "minimal-plane");
  MinimalPlaneConfig c;
  Fields f(j, "minimal_plane");
  c.scene = minimal_scene(f, c.scene, o);
  std::string mode = c.mode == MinimalPlaneConfig::Mode::kVertex ? "vertex" : "translation";
  f.read("mode", mode);
  if (mode == "vertex") {
    c.mode = MinimalPlaneConfig::Mode::kVertex;
  } else if (mode == "translation") {
    c.mode = MinimalPlaneConfig::Mode::kTranslation;
  } else {
    throw ConfigError(fmt::format("unknown minimal-plane mode '{}'", mode));
  }
  std::array<double, 2> offset{c.offset.x(), c.offset.y()};
  f.read("offset", offset);
  c.offset = Vec2(offset[0], offset[1]);
  apply_optimizer(f, c.optimizer);
  f.read("iterations", c.iterations);
  f.read("stop_loss", c.stop_loss);
  f.finish();
  return c;
}

RobustnessConfig robustness_config(const json& j, const CommonOverrides& o) {
  reject_no_shadows(o, "minimal-plane");
  RobustnessConfig c = default_robustness_config();
  Fields f(j, "robustness");
  c.base.scene = minimal_scene(f, c.base.scene, o);
  apply_optimizer(f, c.base.optimizer);
  f.read("iterations", c.base.iterations);
  f.read("kernel_sizes", c.kernel_sizes);
  f.read("offsets", c.offsets);
  f.read("tolerance", c.tolerance);
  f.finish();
  if (!std::is_sorted(c.offsets.begin(), c.offsets.end())) throw ConfigError("robustness offsets must be ascending");
  return c;
}

PoseConfig pose_config(const json& j, const CommonOverrides& o) {
  PoseConfig c;
  Fields f(j, "pose_estimation");
  f.read("resolution", c.scene.resolution);
  apply_shadow_resolution(f, c.scene.shadow_resolution, o);
  apply_kernel(f, c.scene.kernel, o);
  f.read("shadows", c.scene.shadows);
  if (o.no_shadows) c.scene.shadows = false;
  f.read("antialias", c.scene.antialias);
  if (o.no_antialias) c.scene.antialias = false;
  apply_optimizer(f, c.optimizer);
  f.read("iterations", c.iterations);
  f.read("runs", c.runs);
  read_seed(f, c.seed, o);
  f.read("translation_range", c.translation_range);
  f.read("rotation_range_deg", c.rotation_range_deg);
  f.finish();
  check_positive(c.scene.resolution, "resolution");
  return c;
}

LightEstimationConfig light_estimation_config(const json& j, const CommonOverrides& o) {
  reject_no_shadows(o, "light-estimation");
  LightEstimationConfig c;
  Fields f(j, "light_estimation");
  f.read("resolution", c.scene.resolution);
  apply_shadow_resolution(f, c.scene.shadow_resolution, o);
  apply_kernel(f, c.scene.kernel, o);
  if (o.no_antialias) throw ConfigError("--no-antialias does not apply to light-estimation");
  f.read("lights", c.lights);
  apply_optimizer(f, c.optimizer);
  f.read("iterations", c.iterations);
  f.read("runs", c.runs);
  read_seed(f, c.seed, o);
  f.read("cone_deg", c.cone_deg);
  f.finish();
  check_positive(c.lights, "lights");
  return c;
}

ShadowArtConfig shadow_art_config(const json& j, const CommonOverrides& o) {
  reject_no_shadows(o, "shadow-art");
  ShadowArtConfig c;
  Fields f(j, "shadow_art");
  f.read("views", c.views);
  f.read("resolution", c.resolution);
  apply_shadow_resolution(f, c.shadow_resolution, o);
  apply_kernel(f, c.kernel, o);
  f.read("antialias", c.antialias);
  if (o.no_antialias) c.antialias = false;
  f.read("segments", c.segments);
  f.read("stacks", c.stacks);
  f.read("radius", c.radius);
  f.read("lambda", c.lambda);
  f.read("normal_weight", c.normal_weight);
  apply_optimizer(f, c.optimizer);
  f.read("iterations", c.iterations);
  if (const json* targets = f.child("targets")) {
    if (!targets->is_array()) throw ConfigError("shadow_art.targets: expected an array");
    c.targets.clear();
    for (const json& t : *targets) {
      Fields tf(t, "shadow_art.targets[]");
      TargetShape shape;
      std::string kind = "disk";
      tf.read("kind", kind);
      shape.kind = parse_target_kind(kind);
      tf.read("size", shape.size);
      tf.finish();
      c.targets.push_back(shape);
    }
  }
  std::uint64_t unused_seed = 0;
  f.read("seed", unused_seed);
  f.finish();
  if (c.views < 1 || c.views > 2) throw ConfigError("shadow_art.views must be 1 or 2");
  if (static_cast<int>(c.targets.size()) != c.views) {
    throw ConfigError(fmt::format("shadow_art: {} views need {} targets, got {}", c.views, c.views, c.targets.size()));
  }
  return c;
}

AcneSceneOptions acne_config(const json& j, const CommonOverrides& o) {
  AcneSceneOptions c;
  Fields f(j, "render");
  f.read("resolution", c.resolution);
  apply_shadow_resolution(f, c.shadow_resolution, o);
  apply_kernel(f, c.kernel, o);
  f.read("slant_deg", c.slant_deg);
  std::array<double, 3> d{c.light_direction.x(), c.light_direction.y(), c.light_direction.z()};
  f.read("light_direction", d);
  c.light_direction = Vec3(d[0], d[1], d[2]);
  f.read("occluder", c.occluder);
  // Keys consumed by the render command itself.
  f.child("bias");
  f.child("scene");
  f.child("background");
  f.finish();
  return c;
}

}  // namespace umbra
