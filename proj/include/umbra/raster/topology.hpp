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

#include "umbra/core/types.hpp"

#include <span>
#include <vector>

namespace umbra {

// Undirected edge adjacency of an indexed triangle list. Edge k of a face
// runs from face[k] to face[(k + 1) % 3].
class EdgeTopology {
 public:
  EdgeTopology() = default;
  EdgeTopology(std::span<const Face> faces, int vertex_count);

  int edge_count() const { return static_cast<int>(edge_faces_.size()); }
  int face_edge(int face, int k) const { return face_edges_[3 * face + k]; }
  const std::vector<int>& edge_faces(int edge) const { return edge_faces_[edge]; }
  const std::array<int, 2>& edge_vertices(int edge) const { return edge_vertices_[edge]; }

  // Per-vertex sorted neighbor lists.
  const std::vector<std::vector<int>>& vertex_neighbors() const { return neighbors_; }

  // Silhouette test for a view in which face f has facing sign facing[f]
  // (+1, -1, or 0 for degenerate): boundary edges, edges between faces of
  // different facing, and non-manifold edges qualify.
  bool is_silhouette(int edge, std::span<const signed char> facing) const;

 private:
  std::vector<int> face_edges_;
  std::vector<std::vector<int>> edge_faces_;
  std::vector<std::array<int, 2>> edge_vertices_;
  std::vector<std::vector<int>> neighbors_;
};

}  // namespace umbra
