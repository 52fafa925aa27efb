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

#include "umbra/optim/preconditioner.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <utility>

namespace umbra {

struct LaplacianPreconditioner::Solver {
  Eigen::LDLT<Eigen::MatrixXd> dense;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
};

LaplacianPreconditioner::LaplacianPreconditioner(std::span<const Face> faces, int vertex_count, double lambda)
    : n_(vertex_count), lambda_(lambda), solver_(std::make_unique<Solver>()) {
  if (lambda < 0.0) throw ConfigError("preconditioner lambda must be >= 0");
  std::set<std::pair<int, int>> edges;
  for (const Face& f : faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k], b = f[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  std::vector<Eigen::Triplet<double>> t;
  std::vector<double> diag(n_, 1.0);
  for (const auto& [a, b] : edges) {
    t.emplace_back(a, b, -lambda);
    t.emplace_back(b, a, -lambda);
    diag[a] += lambda;
    diag[b] += lambda;
  }
  for (int i = 0; i < n_; ++i) t.emplace_back(i, i, diag[i]);
  system_.resize(n_, n_);
  system_.setFromTriplets(t.begin(), t.end());
  if (dense()) {
    solver_->dense.compute(Eigen::MatrixXd(system_));
  } else {
    solver_->cg.setTolerance(kTolerance);
    solver_->cg.setMaxIterations(std::max(1000, 10 * n_));
    solver_->cg.compute(system_);
  }
}

LaplacianPreconditioner::~LaplacianPreconditioner() = default;
LaplacianPreconditioner::LaplacianPreconditioner(LaplacianPreconditioner&&) noexcept = default;
LaplacianPreconditioner& LaplacianPreconditioner::operator=(LaplacianPreconditioner&&) noexcept = default;

std::vector<Vec3> LaplacianPreconditioner::apply(std::span<const Vec3> g) const {
  if (static_cast<int>(g.size()) != n_) throw PipelineError("preconditioner: gradient size mismatch");
  Eigen::MatrixXd rhs(n_, 3);
  for (int i = 0; i < n_; ++i) rhs.row(i) = g[i].transpose();
  Eigen::MatrixXd x(n_, 3);
  if (lambda_ == 0.0) {
    x = rhs;
  } else if (dense()) {
    x = solver_->dense.solve(rhs);
  } else {
    for (int c = 0; c < 3; ++c) {
      x.col(c) = solver_->cg.solve(rhs.col(c));
      if (solver_->cg.info() != Eigen::Success) {
        const double residual = (system_ * x.col(c) - rhs.col(c)).norm() / std::max(rhs.col(c).norm(), 1e-300);
        throw PipelineError(fmt::format("preconditioner: CG did not converge (relative residual {:.3e} after {} "
                                        "iterations)",
                                        residual, solver_->cg.iterations()));
      }
    }
  }
  std::vector<Vec3> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = x.row(i).transpose();
  return out;
}

void LaplacianPreconditioner::apply_inplace(std::span<double> block) const {
  if (static_cast<int>(block.size()) != 3 * n_) throw PipelineError("preconditioner: block size mismatch");
  std::vector<Vec3> g(n_);
  for (int i = 0; i < n_; ++i) g[i] = Vec3(block[3 * i], block[3 * i + 1], block[3 * i + 2]);
  const std::vector<Vec3> out = apply(g);
  for (int i = 0; i < n_; ++i) {
    for (int c = 0; c < 3; ++c) block[3 * i + c] = out[i][c];
  }
}

}  // namespace umbra
