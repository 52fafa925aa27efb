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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace umbra {

// Linear [0,1] -> 8 bit: clamp, optional 1/gamma encoding, round.
Image8 to_image8(const Image& image, double gamma = 1.0);
// 8 bit -> [0,1], with optional gamma decoding.
Image from_image8(const Image8& image, double gamma = 1.0);

// PNG with 1 (gray), 2 (gray + alpha), 3 (RGB) or 4 (RGBA) channels.
std::vector<std::uint8_t> encode_png(const Image8& image);
Image8 decode_png(std::span<const std::uint8_t> bytes);
void save_png(const std::string& path, const Image8& image);
Image8 load_png(const std::string& path);

// Raw float32 dump: "UMBR" magic, then little-endian uint32 width, height,
// channels, then width*height*channels little-endian float32 values in
// row-major, interleaved order.
void save_raw(const std::string& path, const Image& image);
Image load_raw(const std::string& path);

// Maps a signed map to gray: 0.5 + 0.5 * value / max|value| (0.5 when all zero).
Image signed_to_gray(const Image& image);
// Maps a map to [0,1] by dividing by its maximum absolute value.
Image normalize_abs(const Image& image);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace umbra
