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

#include "umbra/optim/optimizer.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace umbra {

// Returns the loss at params and writes d loss / d params into grad.
using Objective = std::function<double(std::span<const double> params, std::vector<double>& grad)>;

struct TraceRecord {
  int iteration = 0;
  double loss = 0.0;
  double seconds = 0.0;  // wall time since the run started
};

struct Trace {
  std::vector<TraceRecord> records;
  std::vector<double> initial;
  std::vector<double> final_params;  // last parameters with a finite loss
  std::vector<std::pair<int, std::vector<double>>> snapshots;
  bool aborted = false;
  std::string message;

  // Hash of losses and parameters; wall times are excluded.
  std::uint64_t hash() const;
  double final_loss() const { return records.empty() ? 0.0 : records.back().loss; }
};

struct RunOptions {
  int iterations = 100;
  OptimizerConfig optimizer;
  // Applied to the gradient before the optimizer step (preconditioning).
  std::function<void(std::vector<double>& grad)> transform_gradient;
  // Called after each evaluation with the iteration, loss and parameters.
  std::function<void(int iteration, double loss, std::span<const double> params)> on_iteration;
  int snapshot_every = 0;
  // Stops early once the loss is at or below this value.
  double stop_loss = -1.0;
};

// Runs `iterations` evaluate/step rounds. A non-finite loss or gradient
// aborts the run, keeping the last good parameters in the trace.
Trace run_optimization(const Objective& objective, std::vector<double> params, const RunOptions& options);

// One JSON object per line: {"iteration", "loss", "seconds"}.
void write_trace_jsonl(const Trace& trace, std::ostream& out);
void save_trace_jsonl(const Trace& trace, const std::string& path);

}  // namespace umbra
