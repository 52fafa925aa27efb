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

#include "umbra/shadow/filter.hpp"

#include "umbra/core/parallel.hpp"

#include <algorithm>

namespace umbra {

namespace {

constexpr int kLinesPerChunk = 32;

void horizontal(const Image& in, std::span<const double> taps, Image& out) {
  const int w = in.width(), h = in.height(), ch = in.channels(), r = static_cast<int>(taps.size()) / 2;
  parallel_for_chunks(chunk_count(h, kLinesPerChunk), [&](int c) {
    const auto [y0, y1] = chunk_range(c, h, kLinesPerChunk);
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int k = 0; k < ch; ++k) {
          double acc = 0.0;
          for (int i = -r; i <= r; ++i) acc += taps[i + r] * in.at(std::clamp(x + i, 0, w - 1), y, k);
          out.at(x, y, k) = acc;
        }
      }
    }
  });
}

void vertical(const Image& in, std::span<const double> taps, Image& out) {
  const int w = in.width(), h = in.height(), ch = in.channels(), r = static_cast<int>(taps.size()) / 2;
  parallel_for_chunks(chunk_count(h, kLinesPerChunk), [&](int c) {
    const auto [y0, y1] = chunk_range(c, h, kLinesPerChunk);
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int k = 0; k < ch; ++k) {
          double acc = 0.0;
          for (int i = -r; i <= r; ++i) acc += taps[i + r] * in.at(x, std::clamp(y + i, 0, h - 1), k);
          out.at(x, y, k) = acc;
        }
      }
    }
  });
}

// Transposes scatter along a line; each line only touches itself.
void horizontal_adjoint(const Image& out_bar, std::span<const double> taps, Image& in_bar) {
  const int w = out_bar.width(), h = out_bar.height(), ch = out_bar.channels(), r = static_cast<int>(taps.size()) / 2;
  parallel_for_chunks(chunk_count(h, kLinesPerChunk), [&](int c) {
    const auto [y0, y1] = chunk_range(c, h, kLinesPerChunk);
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int k = 0; k < ch; ++k) {
          const double g = out_bar.at(x, y, k);
          if (g == 0.0) continue;
          for (int i = -r; i <= r; ++i) in_bar.at(std::clamp(x + i, 0, w - 1), y, k) += taps[i + r] * g;
        }
      }
    }
  });
}

void vertical_adjoint(const Image& out_bar, std::span<const double> taps, Image& in_bar) {
  const int w = out_bar.width(), h = out_bar.height(), ch = out_bar.channels(), r = static_cast<int>(taps.size()) / 2;
  parallel_for_chunks(chunk_count(w, kLinesPerChunk), [&](int c) {
    const auto [x0, x1] = chunk_range(c, w, kLinesPerChunk);
    for (int y = 0; y < h; ++y) {
      for (int x = x0; x < x1; ++x) {
        for (int k = 0; k < ch; ++k) {
          const double g = out_bar.at(x, y, k);
          if (g == 0.0) continue;
          for (int i = -r; i <= r; ++i) in_bar.at(x, std::clamp(y + i, 0, h - 1), k) += taps[i + r] * g;
        }
      }
    }
  });
}

}  // namespace

void filter_separable(const Image& in, std::span<const double> taps, Image& out) {
  if (taps.size() == 1 && taps[0] == 1.0) {
    out = in;
    return;
  }
  Image tmp(in.width(), in.height(), in.channels());
  horizontal(in, taps, tmp);
  out = Image(in.width(), in.height(), in.channels());
  vertical(tmp, taps, out);
}

void filter_separable_adjoint(const Image& out_bar, std::span<const double> taps, Image& in_bar) {
  if (taps.size() == 1 && taps[0] == 1.0) {
    for (std::size_t i = 0; i < in_bar.size(); ++i) in_bar.values()[i] += out_bar.values()[i];
    return;
  }
  Image tmp_bar(out_bar.width(), out_bar.height(), out_bar.channels());
  vertical_adjoint(out_bar, taps, tmp_bar);
  horizontal_adjoint(tmp_bar, taps, in_bar);
}

}  // namespace umbra
