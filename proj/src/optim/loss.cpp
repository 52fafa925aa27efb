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

#include "umbra/optim/loss.hpp"

#include "umbra/raster/topology.hpp"
#include "umbra/scene/mesh.hpp"

#include <fmt/format.h>

namespace umbra {

double mse_loss(const Image& image, const Image& reference, const Image* mask, Image* grad) {
  if (!image.same_shape(reference)) {
    throw ConfigError(fmt::format("mse_loss: image {}x{}x{} vs reference {}x{}x{}", image.width(), image.height(),
                                  image.channels(), reference.width(), reference.height(), reference.channels()));
  }
  if (mask && (mask->width() != image.width() || mask->height() != image.height())) {
    throw ConfigError("mse_loss: mask size mismatch");
  }
  long long count = 0;
  double acc = 0.0;
  for (int p = 0; p < image.pixel_count(); ++p) {
    if (mask && (*mask)(p) == 0.0) continue;
    for (int c = 0; c < image.channels(); ++c) {
      const double diff = image(p, c) - reference(p, c);
      acc += diff * diff;
      ++count;
    }
  }
  if (grad) *grad = Image(image.width(), image.height(), image.channels());
  if (count == 0) return 0.0;
  const double n = static_cast<double>(count);
  if (grad) {
    for (int p = 0; p < image.pixel_count(); ++p) {
      if (mask && (*mask)(p) == 0.0) continue;
      for (int c = 0; c < image.channels(); ++c) (*grad)(p, c) = 2.0 * (image(p, c) - reference(p, c)) / n;
    }
  }
  return acc / n;
}

double normal_consistency(std::span<const Vec3> positions, std::span<const Face> faces, double weight,
                          std::vector<Vec3>* grad) {
  const EdgeTopology topo(std::vector<Face>(faces.begin(), faces.end()), static_cast<int>(positions.size()));
  std::vector<Vec3> area(faces.size()), unit(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    area[f] = face_area_normal(positions[faces[f][0]], positions[faces[f][1]], positions[faces[f][2]]);
    unit[f] = area[f].normalized();
  }
  std::vector<std::array<int, 2>> pairs;
  for (int e = 0; e < topo.edge_count(); ++e) {
    const auto& adj = topo.edge_faces(e);
    if (adj.size() == 2) pairs.push_back({adj[0], adj[1]});
  }
  if (pairs.empty()) return 0.0;
  const double scale = weight / static_cast<double>(pairs.size());
  double acc = 0.0;
  for (const auto& [a, b] : pairs) acc += 1.0 - unit[a].dot(unit[b]);
  if (grad) {
    grad->resize(positions.size(), Vec3::Zero());
    std::vector<Vec3> unit_bar(faces.size(), Vec3::Zero());
    for (const auto& [a, b] : pairs) {
      unit_bar[a] -= scale * unit[b];
      unit_bar[b] -= scale * unit[a];
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const double len = area[f].norm();
      const Vec3 c_bar = (unit_bar[f] - unit[f] * unit[f].dot(unit_bar[f])) / len;
      const Face& face = faces[f];
      const Vec3 e1 = positions[face[1]] - positions[face[0]];
      const Vec3 e2 = positions[face[2]] - positions[face[0]];
      const Vec3 e1_bar = e2.cross(c_bar);
      const Vec3 e2_bar = c_bar.cross(e1);
      (*grad)[face[1]] += e1_bar;
      (*grad)[face[2]] += e2_bar;
      (*grad)[face[0]] -= e1_bar + e2_bar;
    }
  }
  return scale * acc;
}

}  // namespace umbra
