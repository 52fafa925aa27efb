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

#include "umbra/raster/topology.hpp"

#include <algorithm>
#include <unordered_map>

namespace umbra {

EdgeTopology::EdgeTopology(std::span<const Face> faces, int vertex_count) {
  std::unordered_map<long long, int> index;
  index.reserve(faces.size() * 2);
  face_edges_.resize(faces.size() * 3);
  neighbors_.assign(vertex_count, {});
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int a = faces[f][k], b = faces[f][(k + 1) % 3];
      const int lo = std::min(a, b), hi = std::max(a, b);
      const long long key = static_cast<long long>(lo) * (vertex_count + 1LL) + hi;
      auto [it, inserted] = index.emplace(key, edge_count());
      if (inserted) {
        edge_faces_.emplace_back();
        edge_vertices_.push_back({lo, hi});
        neighbors_[lo].push_back(hi);
        neighbors_[hi].push_back(lo);
      }
      edge_faces_[it->second].push_back(static_cast<int>(f));
      face_edges_[3 * f + k] = it->second;
    }
  }
  for (auto& n : neighbors_) std::sort(n.begin(), n.end());
}

bool EdgeTopology::is_silhouette(int edge, std::span<const signed char> facing) const {
  const std::vector<int>& f = edge_faces_[edge];
  if (f.size() != 2) return true;
  return facing[f[0]] != facing[f[1]] || facing[f[0]] == 0;
}

}  // namespace umbra
