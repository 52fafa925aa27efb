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

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>

namespace umbra {

// Runs fn(chunk) for every chunk in [0, count). Work must be partitioned so
// that each chunk writes only to memory it owns; reductions go through
// per-chunk scratch merged by the caller in chunk order, which keeps results
// independent of the thread count.
template <typename Fn>
void parallel_for_chunks(int count, Fn&& fn) {
  if (count <= 0) return;
  if (count == 1) {
    fn(0);
    return;
  }
  tbb::parallel_for(tbb::blocked_range<int>(0, count, 1), [&](const tbb::blocked_range<int>& r) {
    for (int i = r.begin(); i != r.end(); ++i) fn(i);
  });
}

// Splits [0, n) into chunks of `grain` items and returns the chunk count.
inline int chunk_count(int n, int grain) { return n <= 0 ? 0 : (n + grain - 1) / grain; }

inline std::pair<int, int> chunk_range(int chunk, int n, int grain) {
  const int begin = chunk * grain;
  return {begin, std::min(n, begin + grain)};
}

}  // namespace umbra
