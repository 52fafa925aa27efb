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

#include "umbra/optim/optimizer.hpp"

#include "umbra/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace umbra {

Method parse_method(const std::string& name) {
  if (name == "sgd") return Method::kSgd;
  if (name == "adam") return Method::kAdam;
  throw ConfigError("unknown optimizer method '" + name + "' (expected sgd or adam)");
}

std::string to_string(Method method) { return method == Method::kSgd ? "sgd" : "adam"; }

Optimizer::Optimizer(OptimizerConfig config, std::size_t size) : config_(config), m_(size, 0.0), v_(size, 0.0) {}

void Optimizer::reset() {
  std::fill(m_.begin(), m_.end(), 0.0);
  std::fill(v_.begin(), v_.end(), 0.0);
  iteration_ = 0;
}

void Optimizer::clear_momentum() { std::fill(m_.begin(), m_.end(), 0.0); }

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw PipelineError("optimizer: parameter/gradient size does not match the optimizer state");
  }
  ++iteration_;
  const double a = config_.step_size;
  if (config_.method == Method::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= a * grad[i];
    return;
  }
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, iteration_);
  const double c2 = 1.0 - std::pow(b2, iteration_);
  double v_max = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
    v_max = std::max(v_max, v_[i]);
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double m_hat = m_[i] / c1;
    const double v_hat = (config_.uniform ? v_max : v_[i]) / c2;
    params[i] -= a * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

}  // namespace umbra
