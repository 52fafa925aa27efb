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

#include "umbra/scene/scene.hpp"

#include <json.hpp>

#include <string>

namespace umbra {

// Builds a scene from the JSON description documented in
// docs/scene-format.md. Relative OBJ paths resolve against `base_dir`.
// Directional lights without an explicit "fit" are fitted to the scene once,
// here, and stay fixed afterwards.
Scene scene_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
Scene load_scene(const std::string& path);

nlohmann::json camera_to_json(const Camera& camera);
Camera camera_from_json(const nlohmann::json& j);
nlohmann::json light_to_json(const LightSource& light);
LightSource light_from_json(const nlohmann::json& j);
nlohmann::json settings_to_json(const RenderSettings& settings);
RenderSettings settings_from_json(const nlohmann::json& j, RenderSettings base = {});

Vec3 vec3_from_json(const nlohmann::json& j);
nlohmann::json vec3_to_json(const Vec3& v);

}  // namespace umbra
