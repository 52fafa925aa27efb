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

#include <span>

namespace umbra {

// Separable convolution with normalized taps (odd count) and replicate
// border, applied per channel: horizontal pass, then vertical.
void filter_separable(const Image& in, std::span<const double> taps, Image& out);

// Exact transpose of filter_separable; accumulates into in_bar.
void filter_separable_adjoint(const Image& out_bar, std::span<const double> taps, Image& in_bar);

}  // namespace umbra
