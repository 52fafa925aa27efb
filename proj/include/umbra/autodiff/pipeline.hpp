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

#include "umbra/core/hash.hpp"
#include "umbra/core/types.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace umbra {

// State every differentiable context carries: the parameter vector, its
// gradient and the scalar loss.
struct ContextBase {
  std::vector<double> params;
  std::vector<double> grad;
  double loss = 0.0;
  double loss_bar = 0.0;
  std::uint64_t generation = 0;
};

using Spans = std::vector<std::span<double>>;

// One node of the pipeline. `forward` reads the buffers returned by
// `inputs` and overwrites those returned by `outputs`; `backward` reads the
// output adjoints and accumulates into the input adjoints. `signature`
// hashes every discrete decision the forward pass made (coverage, branches,
// clamps) so finite differences can be restricted to smooth neighborhoods.
template <typename Ctx>
struct Stage {
  std::string name;
  std::function<void(Ctx&)> forward;
  std::function<void(Ctx&)> backward;
  std::function<Spans(Ctx&)> inputs;
  std::function<Spans(Ctx&)> outputs;
  std::function<Spans(Ctx&)> input_adjoints;
  std::function<Spans(Ctx&)> output_adjoints;
  std::function<void(const Ctx&, Hasher&)> signature;
};

struct StageTape {
  std::vector<int> executed;
  std::size_t param_count = 0;
  std::uint64_t generation = 0;
  bool consumed = false;
};

template <typename Ctx>
class Pipeline {
 public:
  Stage<Ctx>& add(Stage<Ctx> stage) {
    stages_.push_back(std::move(stage));
    return stages_.back();
  }

  const std::vector<Stage<Ctx>>& stages() const { return stages_; }
  std::vector<Stage<Ctx>>& stages() { return stages_; }
  int stage_index(const std::string& name) const {
    for (std::size_t i = 0; i < stages_.size(); ++i) {
      if (stages_[i].name == name) return static_cast<int>(i);
    }
    throw PipelineError(fmt::format("no stage named '{}'", name));
  }

  // Runs every stage in order. The loss is ctx.loss after the last stage.
  StageTape forward(Ctx& ctx) const {
    StageTape tape;
    tape.param_count = ctx.params.size();
    tape.generation = ++ctx.generation;
    ctx.loss = 0.0;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
      const Stage<Ctx>& s = stages_[i];
      s.forward(ctx);
      if (s.outputs) check_finite(s.name, s.outputs(ctx));
      tape.executed.push_back(static_cast<int>(i));
    }
    if (!std::isfinite(ctx.loss)) throw PipelineError("loss is not finite");
    return tape;
  }

  // Fills ctx.grad with d loss / d params by replaying the tape in reverse.
  void backward(Ctx& ctx, StageTape& tape) const {
    backward(ctx, tape, [](Ctx& c) { c.loss_bar = 1.0; });
  }

  // Same, but `seed` sets the output adjoints (all zero on entry) instead of
  // loss_bar = 1, which yields the gradient of any linear functional of the
  // intermediate buffers.
  void backward(Ctx& ctx, StageTape& tape, const std::function<void(Ctx&)>& seed) const {
    if (tape.consumed) throw PipelineError("tape already consumed by a backward pass");
    if (tape.generation != ctx.generation) throw PipelineError("tape is stale: forward ran again since it was recorded");
    if (tape.param_count != ctx.params.size()) {
      throw PipelineError(fmt::format("tape recorded {} parameters, context has {}", tape.param_count, ctx.params.size()));
    }
    for (const Stage<Ctx>& s : stages_) {
      if (s.input_adjoints) zero(s.input_adjoints(ctx));
      if (s.output_adjoints) zero(s.output_adjoints(ctx));
    }
    ctx.grad.assign(ctx.params.size(), 0.0);
    ctx.loss_bar = 0.0;
    seed(ctx);
    for (auto it = tape.executed.rbegin(); it != tape.executed.rend(); ++it) {
      const Stage<Ctx>& s = stages_[*it];
      s.backward(ctx);
      if (s.input_adjoints) check_finite(s.name + " (adjoint)", s.input_adjoints(ctx));
    }
    tape.executed.clear();
    tape.consumed = true;
  }

  std::uint64_t signature(const Ctx& ctx) const {
    Hasher h;
    for (const Stage<Ctx>& s : stages_) {
      if (s.signature) s.signature(ctx, h);
    }
    return h.value();
  }

  static void zero(const Spans& spans) {
    for (std::span<double> s : spans) std::fill(s.begin(), s.end(), 0.0);
  }

 private:
  static void check_finite(const std::string& name, const Spans& spans) {
    for (std::span<double> s : spans) {
      for (double v : s) {
        if (!std::isfinite(v)) throw PipelineError(fmt::format("stage '{}' produced a non-finite value", name));
      }
    }
  }

  std::vector<Stage<Ctx>> stages_;
};

struct FdEntry {
  int index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
  bool excluded = false;  // discrete structure changed within +-h
};

inline double relative_error(double analytic, double numeric, double eps) {
  return std::abs(analytic - numeric) / std::max(std::abs(numeric), eps);
}

// Central finite differences of the end-to-end loss against reverse mode.
// Indices whose +-h neighborhood changes any stage signature are excluded.
template <typename Ctx>
std::vector<FdEntry> fd_check(const Pipeline<Ctx>& pipeline, Ctx& ctx, std::span<const int> indices, double h,
                              double eps = 1e-8) {
  StageTape tape = pipeline.forward(ctx);
  const std::uint64_t base_sig = pipeline.signature(ctx);
  pipeline.backward(ctx, tape);
  const std::vector<double> grad = ctx.grad;
  std::vector<FdEntry> out;
  for (int i : indices) {
    FdEntry e;
    e.index = i;
    e.analytic = grad[i];
    const double saved = ctx.params[i];
    ctx.params[i] = saved + h;
    pipeline.forward(ctx);
    const double lp = ctx.loss;
    const bool same_p = pipeline.signature(ctx) == base_sig;
    ctx.params[i] = saved - h;
    pipeline.forward(ctx);
    const double lm = ctx.loss;
    const bool same_m = pipeline.signature(ctx) == base_sig;
    ctx.params[i] = saved;
    e.numeric = (lp - lm) / (2.0 * h);
    e.excluded = !(same_p && same_m);
    e.rel_error = relative_error(e.analytic, e.numeric, eps);
    out.push_back(e);
  }
  pipeline.forward(ctx);
  return out;
}

namespace detail {

inline double& flat_at(const Spans& spans, std::size_t index) {
  for (std::span<double> s : spans) {
    if (index < s.size()) return s[index];
    index -= s.size();
  }
  throw PipelineError("flat index out of range");
}

inline std::size_t flat_size(const Spans& spans) {
  std::size_t n = 0;
  for (std::span<double> s : spans) n += s.size();
  return n;
}

inline double weighted_sum(const Spans& spans, const std::vector<double>& weights) {
  double acc = 0.0;
  std::size_t k = 0;
  for (std::span<double> s : spans) {
    for (double v : s) acc += weights[k++] * v;
  }
  return acc;
}

}  // namespace detail

// Checks one stage in isolation: with random output weights w, compares the
// stage adjoint of <w, outputs> against central differences along one flat
// input index. ctx must hold a completed forward pass. Returns an excluded
// entry when the stage's discrete structure changes within +-h.
template <typename Ctx, typename Rng>
FdEntry stage_fd_check(const Stage<Ctx>& stage, Ctx& ctx, std::size_t input_index, double h, Rng& rng,
                       double eps = 1e-8) {
  const Spans outs = stage.outputs(ctx);
  std::vector<double> weights(detail::flat_size(outs));
  for (double& w : weights) w = rng.uniform(-1.0, 1.0);
  Pipeline<Ctx>::zero(stage.input_adjoints(ctx));
  {
    const Spans out_bar = stage.output_adjoints(ctx);
    std::size_t k = 0;
    for (std::span<double> s : out_bar) {
      for (double& v : s) v = weights[k++];
    }
  }
  stage.backward(ctx);
  FdEntry e;
  e.index = static_cast<int>(input_index);
  e.analytic = detail::flat_at(stage.input_adjoints(ctx), input_index);
  auto signature = [&] {
    Hasher hs;
    if (stage.signature) stage.signature(ctx, hs);
    return hs.value();
  };
  const std::uint64_t base_sig = signature();
  double& x = detail::flat_at(stage.inputs(ctx), input_index);
  const double saved = x;
  x = saved + h;
  stage.forward(ctx);
  const double fp = detail::weighted_sum(stage.outputs(ctx), weights);
  const bool same_p = signature() == base_sig;
  detail::flat_at(stage.inputs(ctx), input_index) = saved - h;
  stage.forward(ctx);
  const double fm = detail::weighted_sum(stage.outputs(ctx), weights);
  const bool same_m = signature() == base_sig;
  detail::flat_at(stage.inputs(ctx), input_index) = saved;
  stage.forward(ctx);
  e.numeric = (fp - fm) / (2.0 * h);
  e.excluded = !(same_p && same_m);
  e.rel_error = relative_error(e.analytic, e.numeric, eps);
  return e;
}

}  // namespace umbra
