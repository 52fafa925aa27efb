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

#include "umbra/scene/mesh.hpp"

#include <iosfwd>
#include <string>

namespace umbra {

// Reads vertex positions and faces. Polygons are fan-triangulated; texture
// and normal indices are ignored, negative (relative) indices are resolved.
TriangleMesh read_obj(std::istream& in);
TriangleMesh load_obj(const std::string& path);

void write_obj(std::ostream& out, const TriangleMesh& mesh);
void save_obj(const std::string& path, const TriangleMesh& mesh);

}  // namespace umbra
