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

#include "umbra/service/protocol.hpp"

#include "umbra/io/image_io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <set>

namespace umbra::service {

using nlohmann::json;

std::string to_string(MessageType type) {
  switch (type) {
    case MessageType::kHello: return "hello";
    case MessageType::kSetTarget: return "set_target";
    case MessageType::kControl: return "control";
    case MessageType::kFrame: return "frame";
    case MessageType::kMesh: return "mesh";
    case MessageType::kStatus: return "status";
    case MessageType::kError: return "error";
  }
  return "unknown";
}

MessageType parse_message_type(const std::string& name) {
  for (MessageType t : {MessageType::kHello, MessageType::kSetTarget, MessageType::kControl, MessageType::kFrame,
                        MessageType::kMesh, MessageType::kStatus, MessageType::kError}) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError(fmt::format("unknown message type '{}'", name));
}

const std::vector<MeshAsset>& mesh_assets() {
  static const std::vector<MeshAsset> assets = {
      {"sphere", 80, 81},
      {"sphere-coarse", 40, 41},
      {"sphere-tiny", 16, 17},
  };
  return assets;
}

const MeshAsset* find_mesh_asset(const std::string& id) {
  for (const MeshAsset& a : mesh_assets()) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

json meshes_json() {
  json list = json::array();
  for (const MeshAsset& a : mesh_assets()) {
    list.push_back({{"id", a.id}, {"vertices", a.vertices()}, {"triangles", a.triangles()}});
  }
  return {{"meshes", list}};
}

namespace {

std::string target_kind_name(TargetShape::Kind kind) {
  switch (kind) {
    case TargetShape::Kind::kDisk: return "disk";
    case TargetShape::Kind::kSquare: return "square";
    case TargetShape::Kind::kSelf: return "self";
  }
  return "self";
}

template <typename T>
void take(const json& j, const char* key, T& out, std::set<std::string>& seen) {
  seen.insert(key);
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("settings.{}: {}", key, e.what()));
  }
}

}  // namespace

SessionSettings settings_from_json(const json& j, SessionSettings s) {
  if (j.is_null()) return s;
  if (!j.is_object()) throw ConfigError("settings: expected an object");
  std::set<std::string> seen;
  take(j, "mesh", s.mesh, seen);
  take(j, "frame_resolution", s.frame_resolution, seen);
  take(j, "shadow_resolution", s.shadow_resolution, seen);
  take(j, "kernel_size", s.kernel_size, seen);
  take(j, "views", s.views, seen);
  take(j, "step_size", s.step_size, seen);
  take(j, "lambda", s.lambda, seen);
  take(j, "normal_weight", s.normal_weight, seen);
  take(j, "colocated", s.colocated, seen);
  take(j, "frame_every", s.frame_every, seen);
  take(j, "mesh_every", s.mesh_every, seen);
  take(j, "max_iterations", s.max_iterations, seen);
  take(j, "heartbeat_ms", s.heartbeat_ms, seen);
  seen.insert("targets");
  if (j.contains("targets")) {
    if (!j["targets"].is_array()) throw ConfigError("settings.targets: expected an array");
    s.targets.clear();
    for (const json& t : j["targets"]) {
      TargetShape shape;
      shape.kind = parse_target_kind(t.value("kind", std::string("self")));
      shape.size = t.value("size", shape.size);
      s.targets.push_back(shape);
    }
  }
  for (const auto& [key, value] : j.items()) {
    if (!seen.count(key)) throw ConfigError(fmt::format("settings: unknown key '{}'", key));
  }
  if (!find_mesh_asset(s.mesh)) throw ConfigError(fmt::format("unknown mesh '{}'", s.mesh));
  if (s.frame_resolution < 8 || s.frame_resolution > 1024) throw ConfigError("frame_resolution must be in [8, 1024]");
  if (s.shadow_resolution < 8 || s.shadow_resolution > 2048) throw ConfigError("shadow_resolution must be in [8, 2048]");
  if (s.views < 1 || s.views > 2) throw ConfigError("views must be 1 or 2");
  if (s.frame_every < 1 || s.mesh_every < 1) throw ConfigError("frame_every and mesh_every must be positive");
  if (s.max_iterations < 0) throw ConfigError("max_iterations must be non-negative");
  if (s.heartbeat_ms < 10) throw ConfigError("heartbeat_ms must be at least 10");
  if (!(s.step_size >= 0.0)) throw ConfigError("step_size must be non-negative");
  if (!s.targets.empty() && static_cast<int>(s.targets.size()) != s.views) {
    throw ConfigError("settings.targets must list one target per view");
  }
  FilterKernel{FilterKernel::Shape::kBox, s.kernel_size}.validate();
  return s;
}

json settings_to_json(const SessionSettings& s) {
  json targets = json::array();
  for (const TargetShape& t : s.targets) targets.push_back({{"kind", target_kind_name(t.kind)}, {"size", t.size}});
  return {{"mesh", s.mesh},
          {"frame_resolution", s.frame_resolution},
          {"shadow_resolution", s.shadow_resolution},
          {"kernel_size", s.kernel_size},
          {"views", s.views},
          {"step_size", s.step_size},
          {"lambda", s.lambda},
          {"normal_weight", s.normal_weight},
          {"colocated", s.colocated},
          {"targets", targets},
          {"frame_every", s.frame_every},
          {"mesh_every", s.mesh_every},
          {"max_iterations", s.max_iterations},
          {"heartbeat_ms", s.heartbeat_ms}};
}

ShadowArtConfig shadow_art_config(const SessionSettings& s) {
  const MeshAsset* asset = find_mesh_asset(s.mesh);
  if (!asset) throw ConfigError(fmt::format("unknown mesh '{}'", s.mesh));
  ShadowArtConfig c;
  c.views = s.views;
  c.resolution = s.frame_resolution;
  c.shadow_resolution = s.shadow_resolution;
  c.kernel.size = s.kernel_size;
  c.segments = asset->segments;
  c.stacks = asset->stacks;
  c.lambda = s.lambda;
  c.normal_weight = s.normal_weight;
  c.optimizer.step_size = s.step_size;
  c.oblique_camera = !s.colocated;
  c.targets = s.targets;
  if (c.targets.empty()) c.targets.assign(s.views, TargetShape{TargetShape::Kind::kSelf, 0.0});
  return c;
}

std::string to_string(ControlCommand command) {
  switch (command) {
    case ControlCommand::kStart: return "start";
    case ControlCommand::kPause: return "pause";
    case ControlCommand::kReset: return "reset";
    case ControlCommand::kSetStepSize: return "set_step_size";
  }
  return "unknown";
}

Control parse_control(const json& j) {
  const std::string name = j.value("command", std::string());
  Control c;
  if (name == "start") {
    c.command = ControlCommand::kStart;
  } else if (name == "pause") {
    c.command = ControlCommand::kPause;
  } else if (name == "reset") {
    c.command = ControlCommand::kReset;
  } else if (name == "set_step_size") {
    c.command = ControlCommand::kSetStepSize;
    if (!j.contains("value") || !j["value"].is_number()) throw ConfigError("set_step_size needs a numeric value");
    c.value = j["value"].get<double>();
    if (!(c.value >= 0.0) || !std::isfinite(c.value)) throw ConfigError("step size must be finite and non-negative");
  } else {
    throw ConfigError(fmt::format("unknown control command '{}'", name));
  }
  return c;
}

std::string encode_gray_png_base64(const Image& gray) {
  Image single(gray.width(), gray.height(), 1);
  for (int p = 0; p < gray.pixel_count(); ++p) single(p) = gray(p, 0);
  return base64_encode(encode_png(to_image8(single)));
}

Image decode_gray_png_base64(const std::string& text) {
  const Image8 img = decode_png(base64_decode(text));
  const Image rgb = from_image8(img);
  Image out(rgb.width(), rgb.height(), 1);
  for (int p = 0; p < rgb.pixel_count(); ++p) out(p) = rgb(p, 0);
  return out;
}

std::vector<std::uint8_t> encode_mesh(std::span<const Vec3> positions) {
  static_assert(std::endian::native == std::endian::little, "mesh encoding assumes a little-endian host");
  const std::uint32_t n = static_cast<std::uint32_t>(positions.size());
  std::vector<std::uint8_t> out(8 + 12 * static_cast<std::size_t>(n));
  std::memcpy(out.data(), "UMSH", 4);
  std::memcpy(out.data() + 4, &n, 4);
  std::uint8_t* dst = out.data() + 8;
  for (const Vec3& p : positions) {
    for (int k = 0; k < 3; ++k) {
      const float f = static_cast<float>(p[k]);
      std::memcpy(dst, &f, 4);
      dst += 4;
    }
  }
  return out;
}

std::vector<Vec3> decode_mesh(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), "UMSH", 4) != 0) throw ConfigError("mesh payload: bad header");
  std::uint32_t n = 0;
  std::memcpy(&n, bytes.data() + 4, 4);
  if (bytes.size() != 8 + 12 * static_cast<std::size_t>(n)) throw ConfigError("mesh payload: truncated");
  std::vector<Vec3> out(n);
  const std::uint8_t* src = bytes.data() + 8;
  for (Vec3& p : out) {
    for (int k = 0; k < 3; ++k) {
      float f = 0.0f;
      std::memcpy(&f, src, 4);
      src += 4;
      p[k] = f;
    }
  }
  return out;
}

json status_message(const std::string& session, const std::string& state, int iteration) {
  return {{"type", "status"}, {"session", session}, {"state", state}, {"iteration", iteration}};
}

json error_message(const std::string& message, const std::string& in_reply_to) {
  json j{{"type", "error"}, {"message", message}};
  if (!in_reply_to.empty()) j["in_reply_to"] = in_reply_to;
  return j;
}

std::string hash_hex(std::uint64_t h) { return fmt::format("{:016x}", h); }

}  // namespace umbra::service
