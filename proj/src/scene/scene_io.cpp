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

#include "umbra/scene/scene_io.hpp"

#include "umbra/scene/obj.hpp"
#include "umbra/scene/primitives.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>

namespace umbra {

using nlohmann::json;

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(fmt::format("expected a 3-vector, got {}", j.dump()));
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

namespace {

std::vector<int> parse_axes(const json& j) {
  std::vector<int> axes;
  if (j.is_string()) {
    for (char c : j.get<std::string>()) {
      if (c < 'x' || c > 'z') throw ConfigError(fmt::format("bad axis '{}'", c));
      axes.push_back(c - 'x');
    }
  } else {
    for (const auto& a : j) axes.push_back(a.get<int>());
  }
  return axes;
}

TriangleMesh mesh_from_json(const json& j, const std::string& base_dir) {
  TriangleMesh mesh;
  if (j.contains("obj")) {
    std::filesystem::path path = j.at("obj").get<std::string>();
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    mesh = load_obj(path.string());
    if (j.value("normalize", true)) normalize_to_unit_cube(mesh);
  } else {
    const std::string prim = j.at("primitive").get<std::string>();
    const Vec3 center = j.contains("center") ? vec3_from_json(j["center"]) : Vec3::Zero();
    if (prim == "plane") {
      const auto half = j.at("half_size");
      mesh = make_plane(center, vec3_from_json(j.at("u_axis")), vec3_from_json(j.at("v_axis")), half[0].get<double>(),
                        half[1].get<double>(), j.value("segments", 1));
    } else if (prim == "box") {
      mesh = make_box(center, vec3_from_json(j.at("half_extent")));
    } else if (prim == "uv_sphere") {
      mesh = make_uv_sphere(center, j.value("radius", 1.0), j.value("segments", 80), j.value("stacks", 81));
    } else if (prim == "icosphere") {
      mesh = make_icosphere(center, j.value("radius", 1.0), j.value("subdivisions", 2));
    } else if (prim == "prism") {
      std::vector<Vec2> poly;
      for (const auto& q : j.at("polygon")) poly.emplace_back(q[0].get<double>(), q[1].get<double>());
      mesh = make_prism(poly, j.at("y0").get<double>(), j.at("y1").get<double>());
      for (Vec3& p : mesh.positions) p += center;
    } else if (prim == "cylinder") {
      mesh = make_cylinder(center, j.value("radius", 0.5), j.value("height", 1.0), j.value("segments", 32));
    } else {
      throw ConfigError(fmt::format("unknown primitive '{}'", prim));
    }
  }
  mesh.validate();
  return mesh;
}

}  // namespace

json camera_to_json(const Camera& c) {
  json j;
  j["projection"] = c.kind == ProjectionKind::kPerspective ? "perspective" : "orthographic";
  j["eye"] = vec3_to_json(c.eye);
  j["target"] = vec3_to_json(c.target);
  j["up"] = vec3_to_json(c.up);
  if (c.kind == ProjectionKind::kPerspective) {
    j["fov_deg"] = degrees(c.fov_y);
  } else {
    j["half_extent"] = {c.half_width, c.half_height};
  }
  j["near"] = c.near;
  j["far"] = c.far;
  j["resolution"] = {c.width, c.height};
  return j;
}

Camera camera_from_json(const json& j) {
  Camera c;
  const std::string proj = j.value("projection", "perspective");
  if (proj == "perspective") {
    c.kind = ProjectionKind::kPerspective;
  } else if (proj == "orthographic") {
    c.kind = ProjectionKind::kOrthographic;
  } else {
    throw ConfigError(fmt::format("unknown projection '{}'", proj));
  }
  if (j.contains("eye")) c.eye = vec3_from_json(j["eye"]);
  if (j.contains("target")) c.target = vec3_from_json(j["target"]);
  if (j.contains("up")) c.up = vec3_from_json(j["up"]);
  if (j.contains("fov_deg")) c.fov_y = radians(j["fov_deg"].get<double>());
  if (j.contains("half_extent")) {
    c.half_width = j["half_extent"][0].get<double>();
    c.half_height = j["half_extent"][1].get<double>();
  }
  c.near = j.value("near", c.near);
  c.far = j.value("far", c.far);
  if (j.contains("resolution")) {
    c.width = j["resolution"][0].get<int>();
    c.height = j["resolution"][1].get<int>();
  }
  c.validate();
  return c;
}

json light_to_json(const LightSource& l) {
  json j;
  j["type"] = l.kind == LightKind::kDirectional ? "directional" : "spot";
  j["direction"] = vec3_to_json(l.direction);
  if (l.kind == LightKind::kSpot) {
    j["position"] = vec3_to_json(l.position);
    j["fov_deg"] = degrees(l.fov);
    j["near"] = l.near;
    j["far"] = l.far;
  } else {
    j["fit"] = {{"center", vec3_to_json(l.fit.center)}, {"radius", l.fit.radius}};
  }
  j["intensity"] = vec3_to_json(l.intensity);
  j["shadow_resolution"] = l.shadow_resolution;
  j["kernel"] = {{"shape", to_string(l.kernel.shape)}, {"size", l.kernel.size}};
  j["up_hint"] = vec3_to_json(l.up_hint);
  return j;
}

LightSource light_from_json(const json& j) {
  LightSource l;
  const std::string type = j.value("type", "directional");
  if (type == "directional") {
    l.kind = LightKind::kDirectional;
  } else if (type == "spot") {
    l.kind = LightKind::kSpot;
  } else {
    throw ConfigError(fmt::format("unknown light type '{}'", type));
  }
  if (j.contains("direction")) l.direction = vec3_from_json(j["direction"]);
  if (l.kind == LightKind::kDirectional) l.direction.normalize();
  if (j.contains("position")) l.position = vec3_from_json(j["position"]);
  if (j.contains("fov_deg")) l.fov = radians(j["fov_deg"].get<double>());
  l.near = j.value("near", l.near);
  l.far = j.value("far", l.far);
  if (j.contains("intensity")) {
    l.intensity = j["intensity"].is_number() ? Vec3::Constant(j["intensity"].get<double>()) : vec3_from_json(j["intensity"]);
  }
  l.shadow_resolution = j.value("shadow_resolution", l.shadow_resolution);
  if (j.contains("kernel")) {
    l.kernel.shape = parse_kernel_shape(j["kernel"].value("shape", std::string("box")));
    l.kernel.size = j["kernel"].value("size", 3);
  }
  if (j.contains("up_hint")) l.up_hint = vec3_from_json(j["up_hint"]);
  if (j.contains("fit")) {
    l.fit.center = vec3_from_json(j["fit"].at("center"));
    l.fit.radius = j["fit"].at("radius").get<double>();
  }
  return l;
}

json settings_to_json(const RenderSettings& s) {
  return {{"antialias", s.antialias},       {"camera_antialias", s.camera_antialias},
          {"shadows", s.shadows},           {"smooth_normals", s.smooth_normals},
          {"background", vec3_to_json(s.background)}, {"variance_floor", s.variance_floor}};
}

RenderSettings settings_from_json(const json& j, RenderSettings s) {
  s.antialias = j.value("antialias", s.antialias);
  s.camera_antialias = j.value("camera_antialias", s.camera_antialias);
  s.shadows = j.value("shadows", s.shadows);
  s.smooth_normals = j.value("smooth_normals", s.smooth_normals);
  if (j.contains("background")) s.background = vec3_from_json(j["background"]);
  s.variance_floor = j.value("variance_floor", s.variance_floor);
  return s;
}

Scene scene_from_json(const json& j, const std::string& base_dir) {
  Scene scene;
  try {
    for (const auto& jm : j.value("meshes", json::array())) {
      MeshInstance m;
      m.name = jm.value("name", fmt::format("mesh{}", scene.meshes.size()));
      m.mesh = mesh_from_json(jm, base_dir);
      if (jm.contains("albedo")) m.albedo = vec3_from_json(jm["albedo"]);
      m.pivot = jm.contains("pivot") ? vec3_from_json(jm["pivot"]) : m.mesh.centroid();
      if (jm.contains("translation")) m.translation = vec3_from_json(jm["translation"]);
      if (jm.contains("pose")) {
        m.pose.tx = jm["pose"].value("tx", 0.0);
        m.pose.ty = jm["pose"].value("ty", 0.0);
        m.pose.phi = radians(jm["pose"].value("phi_deg", 0.0));
      }
      scene.meshes.push_back(std::move(m));
    }
    bool needs_fit = false;
    for (const auto& jl : j.value("lights", json::array())) {
      scene.lights.push_back(light_from_json(jl));
      needs_fit |= scene.lights.back().kind == LightKind::kDirectional && !jl.contains("fit");
    }
    if (needs_fit) {
      std::vector<Sphere> explicit_fits;
      for (const LightSource& l : scene.lights) explicit_fits.push_back(l.fit);
      scene.fit_directional_lights();
      const auto& jls = j["lights"];
      for (std::size_t i = 0; i < scene.lights.size(); ++i) {
        if (jls[i].contains("fit")) scene.lights[i].fit = explicit_fits[i];
      }
    }
    for (const auto& jc : j.value("cameras", json::array())) scene.cameras.push_back(camera_from_json(jc));
    if (j.contains("settings")) scene.settings = settings_from_json(j["settings"]);
    for (const auto& jb : j.value("bindings", json::array())) {
      Binding b;
      b.kind = parse_binding_kind(jb.at("kind").get<std::string>());
      if (jb.contains("mesh")) {
        b.target = jb["mesh"].is_string() ? scene.mesh_index(jb["mesh"].get<std::string>()) : jb["mesh"].get<int>();
      } else {
        b.target = jb.value("light", 0);
      }
      if (jb.contains("axes")) b.axes = parse_axes(jb["axes"]);
      if (b.kind == BindingKind::kVertices) {
        const auto& jv = jb.at("vertices");
        if (jv.is_string() && jv.get<std::string>() == "all") {
          for (int v = 0; v < scene.meshes.at(b.target).mesh.vertex_count(); ++v) b.vertices.push_back(v);
        } else {
          b.vertices = jv.get<std::vector<int>>();
        }
      }
      scene.bind(std::move(b));
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("scene description: {}", e.what()));
  }
  scene.validate();
  return scene;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open scene '{}'", path));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return scene_from_json(j, std::filesystem::path(path).parent_path().string());
}

}  // namespace umbra
