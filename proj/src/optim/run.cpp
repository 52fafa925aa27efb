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

#include "umbra/optim/run.hpp"

#include "umbra/core/hash.hpp"
#include "umbra/core/types.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>

namespace umbra {

std::uint64_t Trace::hash() const {
  Hasher h;
  for (const TraceRecord& r : records) {
    h.add(r.iteration);
    h.add(r.loss);
  }
  h.add(std::span<const double>(final_params));
  for (const auto& [it, p] : snapshots) {
    h.add(it);
    h.add(std::span<const double>(p));
  }
  return h.value();
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

Trace run_optimization(const Objective& objective, std::vector<double> params, const RunOptions& options) {
  Trace trace;
  trace.initial = params;
  trace.final_params = params;
  Optimizer optimizer(options.optimizer, params.size());
  std::vector<double> grad;
  std::vector<double> good = params;
  const auto start = std::chrono::steady_clock::now();
  for (int it = 0; it < options.iterations; ++it) {
    double loss = 0.0;
    try {
      loss = objective(params, grad);
    } catch (const PipelineError& e) {
      trace.aborted = true;
      trace.message = e.what();
      break;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(loss) || !all_finite(grad)) {
      trace.aborted = true;
      trace.message = "non-finite loss or gradient at iteration " + std::to_string(it);
      break;
    }
    trace.records.push_back({it, loss, seconds});
    good = params;
    if (options.on_iteration) options.on_iteration(it, loss, params);
    if (options.snapshot_every > 0 && it % options.snapshot_every == 0) trace.snapshots.emplace_back(it, params);
    if (loss <= options.stop_loss) break;
    if (options.transform_gradient) options.transform_gradient(grad);
    optimizer.step(params, grad);
    if (!all_finite(params)) {
      trace.aborted = true;
      trace.message = "non-finite parameters after iteration " + std::to_string(it);
      break;
    }
  }
  trace.final_params = trace.aborted ? good : params;
  return trace;
}

void write_trace_jsonl(const Trace& trace, std::ostream& out) {
  for (const TraceRecord& r : trace.records) {
    nlohmann::json j{{"iteration", r.iteration}, {"loss", r.loss}, {"seconds", r.seconds}};
    out << j.dump() << '\n';
  }
  if (trace.aborted) out << nlohmann::json{{"aborted", true}, {"message", trace.message}}.dump() << '\n';
}

void save_trace_jsonl(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace file " + path);
  write_trace_jsonl(trace, out);
}

}  // namespace umbra
