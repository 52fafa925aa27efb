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

#include <span>
#include <string>
#include <vector>

namespace umbra {

enum class Method { kSgd, kAdam };

Method parse_method(const std::string& name);
std::string to_string(Method method);

struct OptimizerConfig {
  Method method = Method::kAdam;
  double step_size = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Adam only: share one second-moment estimate (the maximum) across all
  // coordinates, so relative update sizes follow the gradient.
  bool uniform = false;
};

class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::size_t size);

  // In-place update of params from grad.
  void step(std::span<double> params, std::span<const double> grad);
  void reset();
  // Drops the first moment only; the second-moment scale is kept.
  void clear_momentum();

  const OptimizerConfig& config() const { return config_; }
  void set_step_size(double step) { config_.step_size = step; }
  int iteration() const { return iteration_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

 private:
  OptimizerConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  int iteration_ = 0;
};

}  // namespace umbra
