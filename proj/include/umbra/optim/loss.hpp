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

#include <span>
#include <vector>

namespace umbra {

// Mean over unmasked pixels and channels of (image - reference)^2. A mask is
// single-channel; zero entries are excluded. When `grad` is non-null it
// receives 2 (image - reference) / N on unmasked entries and 0 elsewhere.
double mse_loss(const Image& image, const Image& reference, const Image* mask = nullptr, Image* grad = nullptr);

// weight * mean over interior edges of (1 - n_a . n_b). When `grad` is
// non-null, the gradient with respect to each position is added to it.
double normal_consistency(std::span<const Vec3> positions, std::span<const Face> faces, double weight = 1.0,
                          std::vector<Vec3>* grad = nullptr);

}  // namespace umbra
