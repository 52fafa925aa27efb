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

#include "umbra/core/types.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <span>
#include <vector>

namespace umbra {

// Solves (I + lambda L) g' = g per coordinate, with L the uniform graph
// Laplacian of the mesh (L_ii = degree, L_ij = -1 on edges). Meshes below
// kDenseLimit vertices use a dense LDLT factorization, larger ones conjugate
// gradients with relative tolerance kTolerance.
class LaplacianPreconditioner {
 public:
  static constexpr int kDenseLimit = 2000;
  static constexpr double kTolerance = 1e-8;

  LaplacianPreconditioner(std::span<const Face> faces, int vertex_count, double lambda);
  ~LaplacianPreconditioner();
  LaplacianPreconditioner(LaplacianPreconditioner&&) noexcept;
  LaplacianPreconditioner& operator=(LaplacianPreconditioner&&) noexcept;

  double lambda() const { return lambda_; }
  int vertex_count() const { return n_; }
  bool dense() const { return n_ < kDenseLimit; }
  const Eigen::SparseMatrix<double>& system() const { return system_; }

  // Throws PipelineError with the residual when CG does not converge.
  std::vector<Vec3> apply(std::span<const Vec3> g) const;
  // Applies to a flat xyz-interleaved block.
  void apply_inplace(std::span<double> block) const;

 private:
  struct Solver;
  int n_ = 0;
  double lambda_ = 0.0;
  Eigen::SparseMatrix<double> system_;
  std::unique_ptr<Solver> solver_;
};

}  // namespace umbra
