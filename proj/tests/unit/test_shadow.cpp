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
#include "umbra/shadow/moments.hpp"
#include "umbra/shadow/visibility.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

namespace umbra {
namespace {

double dot(const Image& a, const Image& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values()[i] * b.values()[i];
  return s;
}

TEST(Kernel, TapsAreNormalizedAndSymmetric) {
  for (auto shape : {FilterKernel::Shape::kBox, FilterKernel::Shape::kGaussian}) {
    for (int size : {1, 3, 5, 9, 15}) {
      const std::vector<double> taps = FilterKernel{shape, size}.taps();
      ASSERT_EQ(static_cast<int>(taps.size()), size);
      double sum = 0.0;
      for (double t : taps) sum += t;
      EXPECT_NEAR(sum, 1.0, 1e-14);
      for (int i = 0; i < size; ++i) EXPECT_DOUBLE_EQ(taps[i], taps[size - 1 - i]);
    }
  }
  EXPECT_THROW((FilterKernel{FilterKernel::Shape::kBox, 4}.validate()), ConfigError);
  EXPECT_THROW((FilterKernel{FilterKernel::Shape::kBox, 0}.validate()), ConfigError);
}

TEST(Filter, SizeOneIsIdentity) {
  Rng rng(3);
  const Image in = testing::random_image(7, 5, 2, rng);
  Image out;
  const std::vector<double> taps = {1.0};
  filter_separable(in, taps, out);
  EXPECT_EQ(out, in);
}

TEST(Filter, ConstantImageIsFixed) {
  const Image in(9, 6, 2, 0.37);
  Image out;
  const std::vector<double> taps = FilterKernel{FilterKernel::Shape::kGaussian, 7}.taps();
  filter_separable(in, taps, out);
  for (double v : out.values()) EXPECT_NEAR(v, 0.37, 1e-15);
}

TEST(Filter, ReplicatesTheBorder) {
  // One-row ramp: the left output of a 3-box sees (x0, x0, x1).
  Image in(4, 1, 1);
  for (int x = 0; x < 4; ++x) in.at(x, 0) = x;
  Image out;
  const std::vector<double> taps = FilterKernel{FilterKernel::Shape::kBox, 3}.taps();
  filter_separable(in, taps, out);
  EXPECT_NEAR(out.at(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(out.at(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(out.at(3, 0), 8.0 / 3.0, 1e-15);
}

TEST(FilterProperty, AdjointIsTheTranspose) {
  Rng rng(11);
  for (int size : {1, 3, 5, 9}) {
    for (int trial = 0; trial < 5; ++trial) {
      const int w = 3 + rng.index(12), h = 3 + rng.index(12);
      const Image x = testing::random_image(w, h, 2, rng, -1.0, 1.0);
      const Image y = testing::random_image(w, h, 2, rng, -1.0, 1.0);
      const std::vector<double> taps = FilterKernel{FilterKernel::Shape::kGaussian, size}.taps();
      Image fx, fty(w, h, 2);
      filter_separable(x, taps, fx);
      filter_separable_adjoint(y, taps, fty);
      EXPECT_NEAR(dot(fx, y), dot(x, fty), 1e-12);
    }
  }
}

TEST(Bilinear, WeightsPartitionUnity) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const BilinearCell c = bilinear_cell(rng.uniform(-3, 19), rng.uniform(-3, 11), 16, 8);
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      EXPECT_GE(c.weight(k), 0.0);
      sum += c.weight(k);
      EXPECT_GE(c.texel(k, 16), 0);
      EXPECT_LT(c.texel(k, 16), 16 * 8);
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
}

TEST(Bilinear, TexelCenterHitsOneTexel) {
  Image m(8, 8, 2);
  m.at(3, 5, 0) = 0.4;
  m.at(3, 5, 1) = 0.2;
  const MomentSample s = sample_moments(m, bilinear_cell(3.5, 5.5, 8, 8));
  EXPECT_DOUBLE_EQ(s.m1, 0.4);
  EXPECT_DOUBLE_EQ(s.m2, 0.2);
}

TEST(Bilinear, OutsideTheMapClampsWithoutDerivative) {
  const BilinearCell c = bilinear_cell(-2.0, 4.0, 8, 8);
  EXPECT_TRUE(c.border_x);
  EXPECT_FALSE(c.border_y);
  Rng rng(2);
  const Image m = testing::random_image(8, 8, 2, rng);
  const Vec2 g = sample_moments_adjoint(m, c, 1.0, 1.0, nullptr);
  EXPECT_EQ(g.x(), 0.0);
}

TEST(BilinearProperty, AdjointMatchesFiniteDifferences) {
  Rng rng(17);
  const Image m = testing::random_image(12, 12, 2, rng);
  for (int i = 0; i < 50; ++i) {
    const double sx = rng.uniform(1.0, 11.0), sy = rng.uniform(1.0, 11.0);
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
    const BilinearCell c = bilinear_cell(sx, sy, 12, 12);
    Image m_bar(12, 12, 2);
    const Vec2 g = sample_moments_adjoint(m, c, a, b, &m_bar);
    auto f = [&](double x, double y) {
      const BilinearCell cc = bilinear_cell(x, y, 12, 12);
      if (cc.x0 != c.x0 || cc.y0 != c.y0) return std::nan("");
      const MomentSample s = sample_moments(m, cc);
      return a * s.m1 + b * s.m2;
    };
    const double h = 1e-6;
    const double gx = (f(sx + h, sy) - f(sx - h, sy)) / (2 * h);
    const double gy = (f(sx, sy + h) - f(sx, sy - h)) / (2 * h);
    if (std::isnan(gx) || std::isnan(gy)) continue;
    EXPECT_NEAR(g.x(), gx, 1e-6);
    EXPECT_NEAR(g.y(), gy, 1e-6);
    // Texel adjoints: the sample is linear in the moments.
    double lin = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) lin += m_bar.values()[k] * m.values()[k];
    EXPECT_NEAR(lin, f(sx, sy), 1e-12);
  }
}

TEST(Chebyshev, LitWhenInFrontOfTheMean) {
  EXPECT_EQ(chebyshev_visibility(0.3, 0.5, 0.01), 1.0);
  EXPECT_EQ(chebyshev_visibility(0.5, 0.5, 0.01), 1.0);
  EXPECT_DOUBLE_EQ(chebyshev_visibility(0.6, 0.5, 0.01), 0.5);
}

TEST(ChebyshevProperty, BoundedAndMonotoneInDepth) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const double mu = rng.uniform(), var = rng.uniform(1e-6, 0.1);
    const double d1 = rng.uniform(), d2 = d1 + rng.uniform(0.0, 0.5);
    const double v1 = chebyshev_visibility(d1, mu, var), v2 = chebyshev_visibility(d2, mu, var);
    EXPECT_GT(v1, 0.0);
    EXPECT_LE(v1, 1.0);
    EXPECT_LE(v2, v1);
  }
}

TEST(MomentVisibility, FloorsTheVariance) {
  VisibilityPartials p;
  const double v = moment_visibility(0.6, 0.5, 0.25, kVarianceFloor, &p);
  EXPECT_DOUBLE_EQ(v, kVarianceFloor / (kVarianceFloor + 0.01));
  EXPECT_EQ(p.m2, 0.0);
}

TEST(MomentVisibilityProperty, PartialsMatchFiniteDifferences) {
  Rng rng(9);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const double m1 = rng.uniform(0.2, 0.8);
    const double var = rng.uniform(1e-4, 0.02);
    const double m2 = m1 * m1 + var;
    const double d = m1 + rng.uniform(0.01, 0.3);
    VisibilityPartials p;
    moment_visibility(d, m1, m2, kVarianceFloor, &p);
    const double h = 1e-7;
    auto v = [&](double dd, double a, double b) { return moment_visibility(dd, a, b, kVarianceFloor, nullptr); };
    EXPECT_NEAR(p.d, (v(d + h, m1, m2) - v(d - h, m1, m2)) / (2 * h), 1e-5 * (1 + std::abs(p.d)));
    EXPECT_NEAR(p.m1, (v(d, m1 + h, m2) - v(d, m1 - h, m2)) / (2 * h), 1e-5 * (1 + std::abs(p.m1)));
    EXPECT_NEAR(p.m2, (v(d, m1, m2 + h) - v(d, m1, m2 - h)) / (2 * h), 1e-5 * (1 + std::abs(p.m2)));
    ++checked;
  }
  EXPECT_EQ(checked, 300);
}

// Without antialiasing the filtered moments are exact moments of the depth
// distribution that percentage-closer filtering averages over, so the
// one-sided bound must hold at every receiver pixel.
TEST(VisibilityProperty, UpperBoundsPercentageCloserFiltering) {
  for (int k : {3, 5, 9}) {
    MinimalPlaneOptions o;
    o.antialias = false;
    o.kernel.size = k;
    Renderer r(testing::bound_minimal_plane(o));
    r.render();
    const RenderContext& ctx = r.context();
    const LightPass& light = ctx.lights[0];
    const ViewPass& view = ctx.views[0];
    int shadowed = 0;
    for (int p = 0; p < view.raster.pixel_count(); ++p) {
      if (!view.raster.covered(p)) continue;
      const Vec3 x(view.position(p, 0), view.position(p, 1), view.position(p, 2));
      const VisibilityQuery q = query_visibility(x, light.projection, light.moments);
      if (!q.in_frustum || q.floored) continue;
      const double pcf = pcf_reference(x, light.projection, light.raster, light.taps);
      EXPECT_GE(q.v, pcf - 1e-9) << "k=" << k << " pixel " << p;
      shadowed += pcf < 0.5;
    }
    EXPECT_GT(shadowed, 0);
  }
}

TEST(Visibility, OutsideTheLightFootprintIsLit) {
  Renderer r(testing::bound_minimal_plane());
  r.render();
  const LightPass& light = r.context().lights[0];
  const VisibilityQuery q = query_visibility(Vec3(50.0, 50.0, 0.0), light.projection, light.moments);
  EXPECT_FALSE(q.in_frustum);
  EXPECT_EQ(q.v, 1.0);
}

TEST(Visibility, ClassicTestShadowsBehindTheOccluder) {
  Renderer r(testing::bound_minimal_plane());
  r.render();
  const LightPass& light = r.context().lights[0];
  // The light looks down -z; the occluder sits above the receiver's center.
  EXPECT_EQ(classic_visibility(Vec3(0.0, 0.0, 0.0), light.projection, light.raster, 0.01), 0.0);
  EXPECT_EQ(classic_visibility(Vec3(0.9, 0.9, 0.0), light.projection, light.raster, 0.01), 1.0);
}

}  // namespace
}  // namespace umbra
