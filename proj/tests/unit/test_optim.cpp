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

#include "umbra/optim/loss.hpp"
#include "umbra/optim/optimizer.hpp"
#include "umbra/optim/preconditioner.hpp"
#include "umbra/optim/run.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace umbra {
namespace {

TEST(MseLoss, ValueAndGradient) {
  Image a(2, 1, 1), b(2, 1, 1);
  a.at(0, 0) = 1.0;
  a.at(1, 0) = 0.5;
  Image g;
  EXPECT_DOUBLE_EQ(mse_loss(a, b, nullptr, &g), (1.0 + 0.25) / 2.0);
  EXPECT_DOUBLE_EQ(g.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(g.at(1, 0), 0.5);
}

TEST(MseLoss, MaskExcludesPixels) {
  Image a(2, 1, 3, 1.0), b(2, 1, 3);
  Image mask(2, 1, 1);
  mask.at(1, 0) = 1.0;
  a.at(0, 0, 0) = 100.0;
  Image g;
  EXPECT_DOUBLE_EQ(mse_loss(a, b, &mask, &g), 1.0);
  EXPECT_EQ(g.at(0, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(g.at(1, 0, 2), 2.0 / 3.0);
}

TEST(MseLoss, ShapeMismatchThrows) {
  EXPECT_ANY_THROW(mse_loss(Image(2, 2, 1), Image(2, 3, 1)));
}

std::vector<double> flatten(const std::vector<Vec3>& v) {
  std::vector<double> out;
  for (const Vec3& p : v) out.insert(out.end(), {p.x(), p.y(), p.z()});
  return out;
}

TEST(NormalConsistency, FlatPlaneIsZero) {
  const TriangleMesh m = make_plane(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 1.0, 1.0, 4);
  std::vector<Vec3> g(m.vertex_count(), Vec3::Zero());
  EXPECT_NEAR(normal_consistency(m.positions, m.faces, 1.0, &g), 0.0, 1e-15);
  for (const Vec3& v : g) EXPECT_LT(v.norm(), 1e-12);
}

TEST(NormalConsistency, GradientMatchesFiniteDifferences) {
  Rng rng(6);
  TriangleMesh m = make_icosphere(Vec3::Zero(), 1.0, 1);
  for (Vec3& p : m.positions) p += 0.1 * Vec3(rng.normal(), rng.normal(), rng.normal());
  std::vector<Vec3> g(m.vertex_count(), Vec3::Zero());
  const double base = normal_consistency(m.positions, m.faces, 0.7, &g);
  EXPECT_GT(base, 0.0);
  const double h = 1e-6;
  for (int i = 0; i < 15; ++i) {
    const int v = rng.index(m.vertex_count()), c = rng.index(3);
    std::vector<Vec3> p = m.positions;
    p[v][c] += h;
    const double up = normal_consistency(p, m.faces, 0.7);
    p[v][c] -= 2 * h;
    const double dn = normal_consistency(p, m.faces, 0.7);
    EXPECT_NEAR(g[v][c], (up - dn) / (2 * h), 1e-6);
  }
}

TEST(Optimizer, SgdStep) {
  Optimizer opt({Method::kSgd, 0.5}, 2);
  std::vector<double> p = {1.0, 2.0};
  const std::vector<double> g = {0.2, -4.0};
  opt.step(p, g);
  EXPECT_DOUBLE_EQ(p[0], 0.9);
  EXPECT_DOUBLE_EQ(p[1], 4.0);
}

TEST(Optimizer, AdamFirstStepIsTheStepSize) {
  OptimizerConfig c;
  c.step_size = 0.1;
  Optimizer opt(c, 3);
  std::vector<double> p = {0.0, 0.0, 0.0};
  const std::vector<double> g = {3.0, -1e-3, 0.0};
  opt.step(p, g);
  EXPECT_NEAR(p[0], -0.1, 1e-6);
  EXPECT_NEAR(p[1], 0.1, 1e-4);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(opt.iteration(), 1);
}

TEST(Optimizer, UniformAdamKeepsRelativeSizes) {
  OptimizerConfig c;
  c.step_size = 0.1;
  c.uniform = true;
  Optimizer opt(c, 2);
  std::vector<double> p = {0.0, 0.0};
  const std::vector<double> g = {2.0, 0.5};
  opt.step(p, g);
  EXPECT_NEAR(p[0], -0.1, 1e-6);
  EXPECT_NEAR(p[1] / p[0], 0.25, 1e-9);
}

TEST(Optimizer, ResetRestartsTheMoments) {
  Optimizer a({Method::kAdam, 0.05}, 1), b({Method::kAdam, 0.05}, 1);
  std::vector<double> pa = {1.0}, pb = {1.0};
  const std::vector<double> g = {0.3};
  a.step(pa, g);
  a.step(pa, g);
  a.reset();
  pa = {1.0};
  a.step(pa, g);
  b.step(pb, g);
  EXPECT_EQ(pa, pb);
  EXPECT_EQ(a.iteration(), 1);
}

TEST(Optimizer, ClearMomentumKeepsTheScale) {
  Optimizer opt({Method::kAdam, 0.1}, 1);
  std::vector<double> p = {0.0};
  opt.step(p, std::vector<double>{1.0});
  const double v = opt.second_moment()[0];
  opt.clear_momentum();
  EXPECT_EQ(opt.first_moment()[0], 0.0);
  EXPECT_EQ(opt.second_moment()[0], v);
  EXPECT_EQ(opt.iteration(), 1);
}

TEST(Optimizer, ParseMethod) {
  EXPECT_EQ(parse_method("adam"), Method::kAdam);
  EXPECT_EQ(parse_method("sgd"), Method::kSgd);
  EXPECT_THROW(parse_method("lbfgs"), ConfigError);
}

void expect_solves(const LaplacianPreconditioner& pre, const std::vector<Vec3>& g, double tol) {
  const std::vector<Vec3> x = pre.apply(g);
  Eigen::MatrixXd X(x.size(), 3), G(g.size(), 3);
  for (std::size_t i = 0; i < x.size(); ++i) X.row(i) = x[i].transpose(), G.row(i) = g[i].transpose();
  const Eigen::MatrixXd r = pre.system() * X - G;
  EXPECT_LT(r.norm(), tol * G.norm());
}

TEST(Preconditioner, DenseSolve) {
  const TriangleMesh m = make_icosphere(Vec3::Zero(), 1.0, 2);
  const LaplacianPreconditioner pre(m.faces, m.vertex_count(), 10.0);
  EXPECT_TRUE(pre.dense());
  Rng rng(1);
  std::vector<Vec3> g(m.vertex_count());
  for (Vec3& v : g) v = rng.unit_vector();
  expect_solves(pre, g, 1e-10);
}

TEST(Preconditioner, IterativeSolve) {
  const TriangleMesh m = make_icosphere(Vec3::Zero(), 1.0, 4);
  ASSERT_GE(m.vertex_count(), LaplacianPreconditioner::kDenseLimit);
  const LaplacianPreconditioner pre(m.faces, m.vertex_count(), 10.0);
  EXPECT_FALSE(pre.dense());
  Rng rng(2);
  std::vector<Vec3> g(m.vertex_count());
  for (Vec3& v : g) v = rng.unit_vector();
  expect_solves(pre, g, 1e-7);
}

TEST(Preconditioner, SystemIsIdentityPlusScaledLaplacian) {
  const std::vector<Face> f = {{0, 1, 2}, {0, 2, 3}};
  const LaplacianPreconditioner pre(f, 4, 2.0);
  const Eigen::MatrixXd a(pre.system());
  EXPECT_DOUBLE_EQ(a(0, 0), 1.0 + 2.0 * 3);
  EXPECT_DOUBLE_EQ(a(1, 1), 1.0 + 2.0 * 2);
  EXPECT_DOUBLE_EQ(a(0, 2), -2.0);
  EXPECT_DOUBLE_EQ(a(1, 3), 0.0);
}

TEST(PreconditionerProperty, ConstantsPassThroughAndLambdaZeroIsIdentity) {
  const TriangleMesh m = make_uv_sphere(Vec3::Zero(), 1.0, 12, 8);
  Rng rng(4);
  for (double lambda : {0.5, 5.0, 50.0}) {
    const LaplacianPreconditioner pre(m.faces, m.vertex_count(), lambda);
    const Vec3 c = rng.unit_vector();
    for (const Vec3& x : pre.apply(std::vector<Vec3>(m.vertex_count(), c))) EXPECT_LT((x - c).norm(), 1e-10);
  }
  const LaplacianPreconditioner id(m.faces, m.vertex_count(), 0.0);
  std::vector<Vec3> g(m.vertex_count());
  for (Vec3& v : g) v = rng.unit_vector();
  const std::vector<Vec3> x = id.apply(g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT((x[i] - g[i]).norm(), 1e-14);
  std::vector<double> flat = flatten(g);
  id.apply_inplace(flat);
  EXPECT_EQ(flat, flatten(x));
}

Objective quadratic(double target) {
  return [target](std::span<const double> p, std::vector<double>& g) {
    g.assign(p.size(), 0.0);
    double l = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      l += (p[i] - target) * (p[i] - target);
      g[i] = 2.0 * (p[i] - target);
    }
    return l;
  };
}

TEST(RunOptimization, ConvergesOnAQuadratic) {
  RunOptions o;
  o.iterations = 200;
  o.optimizer = {Method::kSgd, 0.1};
  const Trace t = run_optimization(quadratic(3.0), {0.0, 1.0}, o);
  EXPECT_FALSE(t.aborted);
  EXPECT_EQ(t.records.size(), 200u);
  EXPECT_NEAR(t.final_params[0], 3.0, 1e-9);
  for (std::size_t i = 1; i < t.records.size(); ++i) EXPECT_LE(t.records[i].loss, t.records[i - 1].loss);
}

TEST(RunOptimization, StopsAtTheTargetLoss) {
  RunOptions o;
  o.iterations = 1000;
  o.optimizer = {Method::kSgd, 0.1};
  o.stop_loss = 1e-4;
  const Trace t = run_optimization(quadratic(1.0), {0.0}, o);
  EXPECT_LT(t.records.size(), 1000u);
  EXPECT_LE(t.final_loss(), 1e-4);
}

TEST(RunOptimization, NonFiniteLossKeepsTheLastGoodParameters) {
  int calls = 0;
  const Objective f = [&](std::span<const double> p, std::vector<double>& g) {
    g.assign(1, 1.0);
    return ++calls == 4 ? std::nan("") : 10.0 + p[0];
  };
  RunOptions o;
  o.iterations = 10;
  o.optimizer = {Method::kSgd, 1.0};
  const Trace t = run_optimization(f, {0.0}, o);
  EXPECT_TRUE(t.aborted);
  EXPECT_EQ(t.records.size(), 3u);
  EXPECT_EQ(t.final_params[0], -2.0);
}

TEST(RunOptimization, GradientTransformAndSnapshots) {
  RunOptions o;
  o.iterations = 5;
  o.optimizer = {Method::kSgd, 1.0};
  o.transform_gradient = [](std::vector<double>& g) {
    for (double& v : g) v = 0.0;
  };
  o.snapshot_every = 2;
  const Trace t = run_optimization(quadratic(1.0), {0.0}, o);
  EXPECT_EQ(t.final_params[0], 0.0);
  ASSERT_EQ(t.snapshots.size(), 3u);
  EXPECT_EQ(t.snapshots[2].first, 4);
}

TEST(RunOptimization, HashIgnoresWallTime) {
  RunOptions o;
  o.iterations = 20;
  const Trace a = run_optimization(quadratic(2.0), {0.0, 5.0}, o);
  Trace b = run_optimization(quadratic(2.0), {0.0, 5.0}, o);
  for (TraceRecord& r : b.records) r.seconds += 100.0;
  EXPECT_EQ(a.hash(), b.hash());
  b.records[3].loss += 1e-15;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(RunOptimization, JsonlHasOneRecordPerLine) {
  RunOptions o;
  o.iterations = 3;
  const Trace t = run_optimization(quadratic(2.0), {0.0}, o);
  std::ostringstream out;
  write_trace_jsonl(t, out);
  std::istringstream in(out.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_NE(line.find("\"iteration\":" + std::to_string(n)), std::string::npos);
    EXPECT_NE(line.find("\"loss\""), std::string::npos);
    ++n;
  }
  EXPECT_EQ(n, 3);
}

}  // namespace
}  // namespace umbra
