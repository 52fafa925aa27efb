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

#include "umbra/io/image_io.hpp"

#include "umbra/core/types.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace umbra {

Image8 to_image8(const Image& image, double gamma) {
  Image8 out(image.width(), image.height(), image.channels());
  for (std::size_t i = 0; i < image.size(); ++i) {
    double v = std::clamp(image.values()[i], 0.0, 1.0);
    if (gamma != 1.0) v = std::pow(v, 1.0 / gamma);
    out.values()[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return out;
}

Image from_image8(const Image8& image, double gamma) {
  Image out(image.width(), image.height(), image.channels());
  for (std::size_t i = 0; i < image.size(); ++i) {
    double v = image.values()[i] / 255.0;
    if (gamma != 1.0) v = std::pow(v, gamma);
    out.values()[i] = v;
  }
  return out;
}

namespace {

int color_type(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 2: return PNG_COLOR_TYPE_GRAY_ALPHA;
    case 3: return PNG_COLOR_TYPE_RGB;
    case 4: return PNG_COLOR_TYPE_RGBA;
    default: throw ConfigError("png: unsupported channel count " + std::to_string(channels));
  }
}

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void read_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->bytes.size()) png_error(png, "truncated png");
  std::memcpy(data, cursor->bytes.data() + cursor->offset, length);
  cursor->offset += length;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image8& image) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw ConfigError("png: cannot allocate encoder");
  }
  std::vector<std::uint8_t> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ConfigError("png: encoding failed");
  }
  png_set_write_fn(png, &out, write_callback, nullptr);
  png_set_IHDR(png, info, image.width(), image.height(), 8, color_type(image.channels()), PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(image.width()) * image.channels();
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(image.data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image8 decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw ConfigError("png: bad signature");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ConfigError("png: cannot allocate decoder");
  }
  ReadCursor cursor{bytes, 0};
  Image8 image;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ConfigError("png: decoding failed");
  }
  png_set_read_fn(png, &cursor, read_callback);
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_packing(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int c = png_get_channels(png, info);
  image = Image8(w, h, c);
  const std::size_t stride = static_cast<std::size_t>(w) * c;
  for (int y = 0; y < h; ++y) png_read_row(png, image.data() + y * stride, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void save_png(const std::string& path, const Image8& image) {
  const std::vector<std::uint8_t> bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Image8 load_png(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

namespace {

static_assert(std::endian::native == std::endian::little, "raw float32 io assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void save_raw(const std::string& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out.write("UMBR", 4);
  put_u32(out, image.width());
  put_u32(out, image.height());
  put_u32(out, image.channels());
  std::vector<float> values(image.values().begin(), image.values().end());
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 4));
}

Image load_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "UMBR", 4) != 0) throw ConfigError(path + ": not a raw float32 image");
  const int w = static_cast<int>(get_u32(in));
  const int h = static_cast<int>(get_u32(in));
  const int c = static_cast<int>(get_u32(in));
  std::vector<float> values(static_cast<std::size_t>(w) * h * c);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * 4));
  if (!in) throw ConfigError(path + ": truncated raw image");
  Image image(w, h, c);
  std::copy(values.begin(), values.end(), image.values().begin());
  return image;
}

Image signed_to_gray(const Image& image) {
  double m = 0.0;
  for (double v : image.values()) m = std::max(m, std::abs(v));
  Image out(image.width(), image.height(), image.channels(), 0.5);
  if (m == 0.0) return out;
  for (std::size_t i = 0; i < image.size(); ++i) out.values()[i] = 0.5 + 0.5 * image.values()[i] / m;
  return out;
}

Image normalize_abs(const Image& image) {
  double m = 0.0;
  for (double v : image.values()) m = std::max(m, std::abs(v));
  Image out(image.width(), image.height(), image.channels());
  if (m == 0.0) return out;
  for (std::size_t i = 0; i < image.size(); ++i) out.values()[i] = std::abs(image.values()[i]) / m;
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw ConfigError("base64: length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw ConfigError("base64: invalid input");
  std::size_t size = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  if (!text.empty() && text.back() == '=') --size;
  if (text.size() > 1 && text[text.size() - 2] == '=') --size;
  out.resize(size);
  return out;
}

}  // namespace umbra
