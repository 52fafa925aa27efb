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

#include "umbra/core/image.hpp"
#include "umbra/core/types.hpp"
#include "umbra/experiments/shadow_art.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace umbra::service {

// Wire format (docs/protocol.md): every message is a JSON text frame with a
// "type" field. A "mesh" message is followed by one binary frame holding the
// encoded positions.

enum class MessageType { kHello, kSetTarget, kControl, kFrame, kMesh, kStatus, kError };

std::string to_string(MessageType type);
MessageType parse_message_type(const std::string& name);

struct MeshAsset {
  std::string id;
  int segments = 0;
  int stacks = 0;
  int triangles() const { return 2 * segments * (stacks - 1); }
  int vertices() const { return segments * (stacks - 1) + 2; }
};

const std::vector<MeshAsset>& mesh_assets();
const MeshAsset* find_mesh_asset(const std::string& id);
nlohmann::json meshes_json();

struct SessionSettings {
  std::string mesh = "sphere";
  int frame_resolution = 128;
  int shadow_resolution = 256;
  int kernel_size = 3;
  int views = 1;
  double step_size = 0.2;
  double lambda = 20.0;
  double normal_weight = 0.2;
  bool colocated = true;  // light-aligned camera; false selects the oblique one
  // Initial targets; "self" keeps the unmodified shadow, so nothing moves
  // until the client paints.
  std::vector<TargetShape> targets;
  int frame_every = 2;
  int mesh_every = 10;
  int max_iterations = 0;  // pause once reached; 0 runs until paused
  int heartbeat_ms = 1000;
};

// Throws ConfigError on unknown keys, unknown meshes or invalid values.
SessionSettings settings_from_json(const nlohmann::json& j, SessionSettings base = {});
nlohmann::json settings_to_json(const SessionSettings& s);
ShadowArtConfig shadow_art_config(const SessionSettings& s);

enum class ControlCommand { kStart, kPause, kReset, kSetStepSize };

struct Control {
  ControlCommand command = ControlCommand::kStart;
  double value = 0.0;  // step size for kSetStepSize
};

Control parse_control(const nlohmann::json& j);
std::string to_string(ControlCommand command);

// Grayscale PNG (8-bit) to and from a single-channel image in [0, 1].
std::string encode_gray_png_base64(const Image& gray);
Image decode_gray_png_base64(const std::string& text);

// "UMSH", u32 vertex count, then x y z float32 per vertex; little-endian.
std::vector<std::uint8_t> encode_mesh(std::span<const Vec3> positions);
std::vector<Vec3> decode_mesh(std::span<const std::uint8_t> bytes);

nlohmann::json status_message(const std::string& session, const std::string& state, int iteration);
nlohmann::json error_message(const std::string& message, const std::string& in_reply_to = {});

std::string hash_hex(std::uint64_t h);

}  // namespace umbra::service
