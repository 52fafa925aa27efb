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

#include "umbra/core/parallel.hpp"
#include "umbra/render/renderer.hpp"
#include "umbra/shade/shading.hpp"
#include "umbra/shadow/filter.hpp"
#include "umbra/shadow/moments.hpp"

#include <fmt/format.h>

#include <cmath>

namespace umbra {

namespace {

using Ctx = RenderContext;

constexpr int kRowsPerChunk = 8;

template <typename Fn>
void for_rows(int height, Fn&& fn) {
  parallel_for_chunks(chunk_count(height, kRowsPerChunk), [&](int c) {
    const auto [y0, y1] = chunk_range(c, height, kRowsPerChunk);
    for (int y = y0; y < y1; ++y) fn(y);
  });
}

Vec3 pixel3(const Image& img, int p) { return {img(p, 0), img(p, 1), img(p, 2)}; }
void add3(Image& img, int p, const Vec3& v) {
  img(p, 0) += v.x();
  img(p, 1) += v.y();
  img(p, 2) += v.z();
}

void resize_like(Image& bar, const Image& primal) {
  if (!bar.same_shape(primal)) bar = Image(primal.width(), primal.height(), primal.channels());
}

// d/dx of x / |x| applied to an output adjoint.
Vec3 normalize_adjoint(const Vec3& unit, double norm, const Vec3& out_bar) {
  return (out_bar - unit * unit.dot(out_bar)) / norm;
}

void hash_ids(const std::vector<int>& ids, Hasher& h) {
  for (int id : ids) h.add(id);
}

// ---------------------------------------------------------------------------

Stage<Ctx> scatter_stage() {
  Stage<Ctx> s;
  s.name = "Scatter";
  s.forward = [](Ctx& c) {
    c.scene.parameters.scatter(c.scene, c.params);
    c.world = c.scene.world_positions();
    c.world_bar.resize(c.world.size());
    c.light_bar.resize(c.scene.lights.size());
    c.grad.resize(c.params.size());
  };
  s.backward = [](Ctx& c) {
    SceneAdjoint adj;
    adj.reset(c.scene);
    for (std::size_t m = 0; m < c.scene.meshes.size(); ++m) {
      const MeshInstance& inst = c.scene.meshes[m];
      const Mat3 r = rotation_y(inst.pose.phi);
      const Mat3 dr = rotation_y_derivative(inst.pose.phi);
      auto& part = adj.meshes[m];
      const int offset = c.layout.vertex_offset[m];
      for (int v = 0; v < inst.mesh.vertex_count(); ++v) {
        const Vec3& g = c.world_bar[offset + v];
        part.vertices[v] = r.transpose() * g;
        part.translation += g;
        part.pose.x() += g.x();
        part.pose.y() += g.y();
        part.pose.z() += g.dot(dr * (inst.mesh.positions[v] - inst.pivot));
      }
    }
    for (std::size_t l = 0; l < c.scene.lights.size(); ++l) {
      adj.lights[l].direction = c.light_bar[l].direction;
      adj.lights[l].position = c.light_bar[l].position;
      adj.lights[l].intensity = c.light_bar[l].intensity;
    }
    c.scene.parameters.gather_adjoint(adj, c.grad);
  };
  s.inputs = [](Ctx& c) { return Spans{std::span<double>(c.params)}; };
  s.input_adjoints = [](Ctx& c) { return Spans{std::span<double>(c.grad)}; };
  s.outputs = [](Ctx& c) {
    Spans out{doubles(c.world)};
    for (LightSource& l : c.scene.lights) {
      out.push_back(doubles(l.direction));
      out.push_back(doubles(l.position));
      out.push_back(doubles(l.intensity));
    }
    return out;
  };
  s.output_adjoints = [](Ctx& c) {
    Spans out{doubles(c.world_bar)};
    for (LightAdjoint& l : c.light_bar) {
      out.push_back(doubles(l.direction));
      out.push_back(doubles(l.position));
      out.push_back(doubles(l.intensity));
    }
    return out;
  };
  return s;
}

// ---------------------------------------------------------------------------

Stage<Ctx> light_frame_stage(int l) {
  Stage<Ctx> s;
  s.name = fmt::format("LightFrame[{}]", l);
  s.forward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    const LightSource& light = c.scene.lights[l];
    pass.projection = light_frame(light);
    pass.frame = pass.projection.basis.pack();
    pass.taps = light.kernel.taps();
  };
  s.backward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    light_frame_adjoint(c.scene.lights[l], FrameBasis::unpack(pass.frame_bar), c.light_bar[l].direction,
                        c.light_bar[l].position);
  };
  s.inputs = [l](Ctx& c) {
    return Spans{doubles(c.scene.lights[l].direction), doubles(c.scene.lights[l].position)};
  };
  s.input_adjoints = [l](Ctx& c) {
    return Spans{doubles(c.light_bar[l].direction), doubles(c.light_bar[l].position)};
  };
  s.outputs = [l](Ctx& c) { return Spans{doubles(c.lights[l].frame)}; };
  s.output_adjoints = [l](Ctx& c) { return Spans{doubles(c.lights[l].frame_bar)}; };
  return s;
}

Stage<Ctx> light_project_stage(int l) {
  Stage<Ctx> s;
  s.name = fmt::format("LightProject[{}]", l);
  s.forward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    pass.projection.basis = FrameBasis::unpack(pass.frame);
    pass.screen.resize(c.world.size());
    pass.screen_bar.resize(c.world.size());
    for (std::size_t i = 0; i < c.world.size(); ++i) pass.screen[i] = pass.projection.project(c.world[i]);
  };
  s.backward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    FrameBasis fb = FrameBasis::zero();
    for (std::size_t i = 0; i < c.world.size(); ++i) {
      const ScreenPoint& g = pass.screen_bar[i];
      pass.projection.project_adjoint(c.world[i], g.sx, g.sy, g.q, g.d, c.world_bar[i], &fb);
    }
    const auto packed = fb.pack();
    for (int k = 0; k < 12; ++k) pass.frame_bar[k] += packed[k];
  };
  s.inputs = [l](Ctx& c) { return Spans{doubles(c.world), doubles(c.lights[l].frame)}; };
  s.input_adjoints = [l](Ctx& c) { return Spans{doubles(c.world_bar), doubles(c.lights[l].frame_bar)}; };
  s.outputs = [l](Ctx& c) { return Spans{doubles(c.lights[l].screen)}; };
  s.output_adjoints = [l](Ctx& c) { return Spans{doubles(c.lights[l].screen_bar)}; };
  return s;
}

// Adjoint of interpolating per-vertex scalars/vectors with perspective-correct
// barycentrics, pushed into screen-space vertex adjoints.
void push_barycentric_adjoint(const std::vector<ScreenPoint>& screen, const Face& f, int p, int width,
                              const std::array<double, 3>& b_bar, std::vector<ScreenPoint>& screen_bar) {
  const std::array<const ScreenPoint*, 3> s = {&screen[f[0]], &screen[f[1]], &screen[f[2]]};
  std::array<Vec2, 3> sxy_bar = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  std::array<double, 3> q_bar = {0.0, 0.0, 0.0};
  barycentric_adjoint(s, p % width + 0.5, p / width + 0.5, b_bar, sxy_bar, q_bar);
  for (int i = 0; i < 3; ++i) {
    screen_bar[f[i]].sx += sxy_bar[i].x();
    screen_bar[f[i]].sy += sxy_bar[i].y();
    screen_bar[f[i]].q += q_bar[i];
  }
}

Stage<Ctx> shadow_raster_stage(int l) {
  Stage<Ctx> s;
  s.name = fmt::format("ShadowRaster[{}]", l);
  s.forward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    pass.raster = rasterize(pass.screen, c.layout.faces, pass.projection.width, pass.projection.height);
    pass.depth = depth_and_square(pass.raster);
    resize_like(pass.depth_bar, pass.depth);
  };
  s.backward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    const RasterOutput& r = pass.raster;
    for (int p = 0; p < r.pixel_count(); ++p) {
      if (!r.covered(p)) continue;
      const double f_bar = pass.depth_bar(p, 0) + 2.0 * pass.depth(p, 0) * pass.depth_bar(p, 1);
      if (f_bar == 0.0) continue;
      const Face& f = c.layout.faces[r.tri[p]];
      std::array<double, 3> b_bar;
      for (int i = 0; i < 3; ++i) {
        pass.screen_bar[f[i]].d += r.bary[p][i] * f_bar;
        b_bar[i] = pass.screen[f[i]].d * f_bar;
      }
      push_barycentric_adjoint(pass.screen, f, p, r.width, b_bar, pass.screen_bar);
    }
  };
  s.inputs = [l](Ctx& c) { return Spans{doubles(c.lights[l].screen)}; };
  s.input_adjoints = [l](Ctx& c) { return Spans{doubles(c.lights[l].screen_bar)}; };
  s.outputs = [l](Ctx& c) { return Spans{doubles(c.lights[l].depth)}; };
  s.output_adjoints = [l](Ctx& c) { return Spans{doubles(c.lights[l].depth_bar)}; };
  s.signature = [l](const Ctx& c, Hasher& h) { hash_ids(c.lights[l].raster.tri, h); };
  return s;
}

Stage<Ctx> shadow_antialias_stage(int l) {
  Stage<Ctx> s;
  s.name = fmt::format("ShadowAntialias[{}]", l);
  s.forward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    if (c.scene.settings.antialias) {
      pass.plan = plan_antialias(pass.raster, pass.screen, c.layout.faces, c.topology);
    } else {
      pass.plan = AntialiasPlan{pass.raster.width, pass.raster.height, {}};
    }
    apply_antialias(pass.plan, pass.depth, pass.smooth);
    resize_like(pass.smooth_bar, pass.smooth);
  };
  s.backward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    antialias_adjoint(pass.plan, pass.screen, c.layout.faces, pass.depth, pass.smooth_bar, pass.depth_bar,
                      pass.screen_bar);
  };
  s.inputs = [l](Ctx& c) { return Spans{doubles(c.lights[l].depth), doubles(c.lights[l].screen)}; };
  s.input_adjoints = [l](Ctx& c) { return Spans{doubles(c.lights[l].depth_bar), doubles(c.lights[l].screen_bar)}; };
  s.outputs = [l](Ctx& c) { return Spans{doubles(c.lights[l].smooth)}; };
  s.output_adjoints = [l](Ctx& c) { return Spans{doubles(c.lights[l].smooth_bar)}; };
  s.signature = [l](const Ctx& c, Hasher& h) { c.lights[l].plan.hash_into(h); };
  return s;
}

Stage<Ctx> moments_stage(int l) {
  Stage<Ctx> s;
  s.name = fmt::format("Moments[{}]", l);
  s.forward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    filter_separable(pass.smooth, pass.taps, pass.moments);
    resize_like(pass.moments_bar, pass.moments);
  };
  s.backward = [l](Ctx& c) {
    LightPass& pass = c.lights[l];
    filter_separable_adjoint(pass.moments_bar, pass.taps, pass.smooth_bar);
  };
  s.inputs = [l](Ctx& c) { return Spans{doubles(c.lights[l].smooth)}; };
  s.input_adjoints = [l](Ctx& c) { return Spans{doubles(c.lights[l].smooth_bar)}; };
  s.outputs = [l](Ctx& c) { return Spans{doubles(c.lights[l].moments)}; };
  s.output_adjoints = [l](Ctx& c) { return Spans{doubles(c.lights[l].moments_bar)}; };
  return s;
}

// ---------------------------------------------------------------------------

Stage<Ctx> camera_project_stage(int v) {
  Stage<Ctx> s;
  s.name = fmt::format("CameraProject[{}]", v);
  s.forward = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    view.projection = c.scene.cameras[v].frame();
    view.screen.resize(c.world.size());
    view.screen_bar.resize(c.world.size());
    for (std::size_t i = 0; i < c.world.size(); ++i) view.screen[i] = view.projection.project(c.world[i]);
  };
  s.backward = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    for (std::size_t i = 0; i < c.world.size(); ++i) {
      const ScreenPoint& g = view.screen_bar[i];
      view.projection.project_adjoint(c.world[i], g.sx, g.sy, g.q, g.d, c.world_bar[i], nullptr);
    }
  };
  s.inputs = [](Ctx& c) { return Spans{doubles(c.world)}; };
  s.input_adjoints = [](Ctx& c) { return Spans{doubles(c.world_bar)}; };
  s.outputs = [v](Ctx& c) { return Spans{doubles(c.views[v].screen)}; };
  s.output_adjoints = [v](Ctx& c) { return Spans{doubles(c.views[v].screen_bar)}; };
  return s;
}

struct VertexNormals {
  std::vector<Vec3> sum;   // area-weighted sum of face normals
  std::vector<Vec3> unit;
};

VertexNormals vertex_normals(const std::vector<Vec3>& world, const std::vector<Face>& faces) {
  VertexNormals n;
  n.sum.assign(world.size(), Vec3::Zero());
  n.unit.assign(world.size(), Vec3::Zero());
  for (const Face& f : faces) {
    const Vec3 c = face_area_normal(world[f[0]], world[f[1]], world[f[2]]);
    for (int k : f) n.sum[k] += c;
  }
  for (std::size_t i = 0; i < world.size(); ++i) {
    const double len = n.sum[i].norm();
    if (len > 0.0) n.unit[i] = n.sum[i] / len;
  }
  return n;
}

// Pushes the adjoint of c = (x1 - x0) x (x2 - x0) into the vertex adjoints.
void face_normal_adjoint(const std::vector<Vec3>& world, const Face& f, const Vec3& c_bar, std::vector<Vec3>& world_bar) {
  const Vec3 e1 = world[f[1]] - world[f[0]];
  const Vec3 e2 = world[f[2]] - world[f[0]];
  const Vec3 e1_bar = e2.cross(c_bar);
  const Vec3 e2_bar = c_bar.cross(e1);
  world_bar[f[1]] += e1_bar;
  world_bar[f[2]] += e2_bar;
  world_bar[f[0]] -= e1_bar + e2_bar;
}

Vec3 toward_camera(const ProjectionFrame& frame, const Vec3& x) {
  return frame.kind == ProjectionKind::kOrthographic ? Vec3(-frame.basis.forward) : Vec3(frame.basis.origin - x);
}

Stage<Ctx> gbuffer_stage(int v) {
  Stage<Ctx> s;
  s.name = fmt::format("GBuffer[{}]", v);
  s.forward = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    const int w = view.projection.width, h = view.projection.height;
    view.raster = rasterize(view.screen, c.layout.faces, w, h);
    view.position = Image(w, h, 3);
    view.normal = Image(w, h, 3);
    view.albedo = Image(w, h, 3);
    view.flip.assign(static_cast<std::size_t>(w) * h, 0);
    const bool smooth = c.scene.settings.smooth_normals;
    const VertexNormals vn = smooth ? vertex_normals(c.world, c.layout.faces) : VertexNormals{};
    for_rows(h, [&](int y) {
      for (int x = 0; x < w; ++x) {
        const int p = y * w + x;
        if (!view.raster.covered(p)) continue;
        const Face& f = c.layout.faces[view.raster.tri[p]];
        const auto& b = view.raster.bary[p];
        Vec3 pos = Vec3::Zero(), alb = Vec3::Zero(), m = Vec3::Zero();
        for (int i = 0; i < 3; ++i) {
          pos += b[i] * c.world[f[i]];
          alb += b[i] * c.layout.albedo[f[i]];
          if (smooth) m += b[i] * vn.unit[f[i]];
        }
        if (!smooth) m = face_area_normal(c.world[f[0]], c.world[f[1]], c.world[f[2]]);
        const double len = m.norm();
        Vec3 n = len > 0.0 ? Vec3(m / len) : Vec3::Zero();
        if (n.dot(toward_camera(view.projection, pos)) < 0.0) {
          n = -n;
          view.flip[p] = 1;
        }
        for (int k = 0; k < 3; ++k) {
          view.position(p, k) = pos[k];
          view.normal(p, k) = n[k];
          view.albedo(p, k) = alb[k];
        }
      }
    });
    resize_like(view.position_bar, view.position);
    resize_like(view.normal_bar, view.normal);
    resize_like(view.albedo_bar, view.albedo);
  };
  s.backward = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    const int w = view.projection.width;
    const bool smooth = c.scene.settings.smooth_normals;
    const VertexNormals vn = smooth ? vertex_normals(c.world, c.layout.faces) : VertexNormals{};
    std::vector<Vec3> unit_bar(smooth ? c.world.size() : 0, Vec3::Zero());
    for (int p = 0; p < view.raster.pixel_count(); ++p) {
      if (!view.raster.covered(p)) continue;
      const Face& f = c.layout.faces[view.raster.tri[p]];
      const auto& b = view.raster.bary[p];
      const Vec3 x_bar = pixel3(view.position_bar, p);
      const Vec3 a_bar = pixel3(view.albedo_bar, p);
      const Vec3 n_bar = pixel3(view.normal_bar, p);
      std::array<double, 3> b_bar;
      for (int i = 0; i < 3; ++i) {
        b_bar[i] = c.world[f[i]].dot(x_bar) + c.layout.albedo[f[i]].dot(a_bar);
        c.world_bar[f[i]] += b[i] * x_bar;
      }
      if (n_bar.squaredNorm() > 0.0) {
        Vec3 m = Vec3::Zero();
        if (smooth) {
          for (int i = 0; i < 3; ++i) m += b[i] * vn.unit[f[i]];
        } else {
          m = face_area_normal(c.world[f[0]], c.world[f[1]], c.world[f[2]]);
        }
        const double len = m.norm();
        if (len > 0.0) {
          const double sign = view.flip[p] ? -1.0 : 1.0;
          const Vec3 m_bar = normalize_adjoint(m / len, len, sign * n_bar);
          if (smooth) {
            for (int i = 0; i < 3; ++i) {
              b_bar[i] += vn.unit[f[i]].dot(m_bar);
              unit_bar[f[i]] += b[i] * m_bar;
            }
          } else {
            face_normal_adjoint(c.world, f, m_bar, c.world_bar);
          }
        }
      }
      push_barycentric_adjoint(view.screen, f, p, w, b_bar, view.screen_bar);
    }
    if (smooth) {
      std::vector<Vec3> sum_bar(c.world.size(), Vec3::Zero());
      for (std::size_t i = 0; i < c.world.size(); ++i) {
        const double len = vn.sum[i].norm();
        if (len > 0.0) sum_bar[i] = normalize_adjoint(vn.unit[i], len, unit_bar[i]);
      }
      for (const Face& f : c.layout.faces) {
        const Vec3 c_bar = sum_bar[f[0]] + sum_bar[f[1]] + sum_bar[f[2]];
        if (c_bar.squaredNorm() > 0.0) face_normal_adjoint(c.world, f, c_bar, c.world_bar);
      }
    }
  };
  s.inputs = [v](Ctx& c) { return Spans{doubles(c.world), doubles(c.views[v].screen)}; };
  s.input_adjoints = [v](Ctx& c) { return Spans{doubles(c.world_bar), doubles(c.views[v].screen_bar)}; };
  s.outputs = [v](Ctx& c) {
    return Spans{doubles(c.views[v].position), doubles(c.views[v].normal), doubles(c.views[v].albedo)};
  };
  s.output_adjoints = [v](Ctx& c) {
    return Spans{doubles(c.views[v].position_bar), doubles(c.views[v].normal_bar), doubles(c.views[v].albedo_bar)};
  };
  s.signature = [v](const Ctx& c, Hasher& h) {
    hash_ids(c.views[v].raster.tri, h);
    for (signed char f : c.views[v].flip) h.add(static_cast<int>(f));
  };
  return s;
}

ProjectionFrame frame_from_pass(const LightPass& pass) {
  ProjectionFrame frame = pass.projection;
  frame.basis = FrameBasis::unpack(pass.frame);
  return frame;
}

Stage<Ctx> visibility_stage(int v, int l) {
  Stage<Ctx> s;
  s.name = fmt::format("Visibility[{},{}]", v, l);
  s.forward = [v, l](Ctx& c) {
    ViewPass& view = c.views[v];
    const LightPass& pass = c.lights[l];
    const ProjectionFrame frame = frame_from_pass(pass);
    const int w = view.projection.width, h = view.projection.height;
    Image& vis = view.visibility[l];
    vis = Image(w, h, 1, 1.0);
    auto& queries = view.queries[l];
    queries.assign(static_cast<std::size_t>(w) * h, VisibilityQuery{});
    const double floor = c.scene.settings.variance_floor;
    for_rows(h, [&](int y) {
      for (int x = 0; x < w; ++x) {
        const int p = y * w + x;
        if (!view.raster.covered(p)) continue;
        queries[p] = query_visibility(pixel3(view.position, p), frame, pass.moments, floor);
        vis(p) = queries[p].v;
      }
    });
    resize_like(view.visibility_bar[l], vis);
  };
  s.backward = [v, l](Ctx& c) {
    ViewPass& view = c.views[v];
    LightPass& pass = c.lights[l];
    const ProjectionFrame frame = frame_from_pass(pass);
    const double floor = c.scene.settings.variance_floor;
    FrameBasis fb = FrameBasis::zero();
    for (int p = 0; p < view.raster.pixel_count(); ++p) {
      const double g = view.visibility_bar[l](p);
      if (g == 0.0 || !view.raster.covered(p)) continue;
      Vec3 x_bar = Vec3::Zero();
      visibility_adjoint(view.queries[l][p], pixel3(view.position, p), frame, pass.moments, g, floor, x_bar, &fb,
                         &pass.moments_bar);
      add3(view.position_bar, p, x_bar);
    }
    const auto packed = fb.pack();
    for (int k = 0; k < 12; ++k) pass.frame_bar[k] += packed[k];
  };
  s.inputs = [v, l](Ctx& c) {
    return Spans{doubles(c.views[v].position), doubles(c.lights[l].frame), doubles(c.lights[l].moments)};
  };
  s.input_adjoints = [v, l](Ctx& c) {
    return Spans{doubles(c.views[v].position_bar), doubles(c.lights[l].frame_bar), doubles(c.lights[l].moments_bar)};
  };
  s.outputs = [v, l](Ctx& c) { return Spans{doubles(c.views[v].visibility[l])}; };
  s.output_adjoints = [v, l](Ctx& c) { return Spans{doubles(c.views[v].visibility_bar[l])}; };
  s.signature = [v, l](const Ctx& c, Hasher& h) {
    for (const VisibilityQuery& q : c.views[v].queries[l]) q.hash_into(h);
  };
  return s;
}

Stage<Ctx> shade_stage(int v) {
  Stage<Ctx> s;
  s.name = fmt::format("Shade[{}]", v);
  s.forward = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    const int w = view.projection.width, h = view.projection.height;
    view.shaded = Image(w, h, 3);
    const Vec3 bg = c.scene.settings.background;
    std::vector<ProjectionFrame> frames;
    for (const LightPass& pass : c.lights) frames.push_back(pass.projection);
    for_rows(h, [&](int y) {
      std::vector<double> vis;
      for (int x = 0; x < w; ++x) {
        const int p = y * w + x;
        if (!view.raster.covered(p)) {
          for (int k = 0; k < 3; ++k) view.shaded(p, k) = bg[k];
          continue;
        }
        vis.clear();
        for (const Image& img : view.visibility) vis.push_back(img(p));
        const Vec3 color = shade_point(pixel3(view.position, p), pixel3(view.normal, p), pixel3(view.albedo, p),
                                       c.scene.lights, frames, vis);
        for (int k = 0; k < 3; ++k) view.shaded(p, k) = color[k];
      }
    });
    resize_like(view.shaded_bar, view.shaded);
  };
  s.backward = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    const bool shadows = !view.visibility.empty();
    for (int p = 0; p < view.raster.pixel_count(); ++p) {
      if (!view.raster.covered(p)) continue;
      const Vec3 g = pixel3(view.shaded_bar, p);
      if (g.squaredNorm() == 0.0) continue;
      const Vec3 pos = pixel3(view.position, p), n = pixel3(view.normal, p), alb = pixel3(view.albedo, p);
      const Vec3 ga = g.cwiseProduct(alb);
      Vec3 sum = Vec3::Zero();
      Vec3 n_bar = Vec3::Zero(), x_bar = Vec3::Zero();
      for (std::size_t l = 0; l < c.scene.lights.size(); ++l) {
        const LightSource& light = c.scene.lights[l];
        const LightDirection d = light_direction(light, c.lights[l].projection, pos);
        const double cosine = n.dot(d.l);
        if (!(cosine > 0.0) || !d.inside) continue;
        const double vis = shadows ? view.visibility[l](p) : 1.0;
        sum += light.intensity * (cosine * vis);
        c.light_bar[l].intensity += ga * (cosine * vis);
        const double s_bar = ga.dot(light.intensity);
        if (shadows) view.visibility_bar[l](p) += s_bar * cosine;
        const double cos_bar = s_bar * vis;
        n_bar += cos_bar * d.l;
        const Vec3 l_bar = cos_bar * n;
        if (light.kind == LightKind::kDirectional) {
          c.light_bar[l].direction += normalize_adjoint(-d.l, d.scale, -l_bar);
        } else {
          const Vec3 r_bar = normalize_adjoint(d.l, d.scale, l_bar);
          c.light_bar[l].position += r_bar;
          x_bar -= r_bar;
        }
      }
      add3(view.albedo_bar, p, g.cwiseProduct(sum));
      add3(view.normal_bar, p, n_bar);
      add3(view.position_bar, p, x_bar);
    }
  };
  s.inputs = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    Spans in{doubles(view.position), doubles(view.normal), doubles(view.albedo)};
    for (Image& vis : view.visibility) in.push_back(doubles(vis));
    for (LightSource& l : c.scene.lights) {
      in.push_back(doubles(l.direction));
      in.push_back(doubles(l.position));
      in.push_back(doubles(l.intensity));
    }
    return in;
  };
  s.input_adjoints = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    Spans in{doubles(view.position_bar), doubles(view.normal_bar), doubles(view.albedo_bar)};
    for (Image& vis : view.visibility_bar) in.push_back(doubles(vis));
    for (LightAdjoint& l : c.light_bar) {
      in.push_back(doubles(l.direction));
      in.push_back(doubles(l.position));
      in.push_back(doubles(l.intensity));
    }
    return in;
  };
  s.outputs = [v](Ctx& c) { return Spans{doubles(c.views[v].shaded)}; };
  s.output_adjoints = [v](Ctx& c) { return Spans{doubles(c.views[v].shaded_bar)}; };
  s.signature = [v](const Ctx& c, Hasher& h) {
    const ViewPass& view = c.views[v];
    for (int p = 0; p < view.raster.pixel_count(); ++p) {
      if (!view.raster.covered(p)) continue;
      const Vec3 pos = pixel3(view.position, p), n = pixel3(view.normal, p);
      for (std::size_t l = 0; l < c.scene.lights.size(); ++l) {
        const LightDirection d = light_direction(c.scene.lights[l], c.lights[l].projection, pos);
        h.add(n.dot(d.l) > 0.0 && d.inside);
      }
    }
  };
  return s;
}

Stage<Ctx> camera_antialias_stage(int v) {
  Stage<Ctx> s;
  s.name = fmt::format("CameraAntialias[{}]", v);
  s.forward = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    if (c.scene.settings.camera_antialias) {
      view.plan = plan_antialias(view.raster, view.screen, c.layout.faces, c.topology);
    } else {
      view.plan = AntialiasPlan{view.raster.width, view.raster.height, {}};
    }
    apply_antialias(view.plan, view.shaded, view.image);
    resize_like(view.image_bar, view.image);
  };
  s.backward = [v](Ctx& c) {
    ViewPass& view = c.views[v];
    antialias_adjoint(view.plan, view.screen, c.layout.faces, view.shaded, view.image_bar, view.shaded_bar,
                      view.screen_bar);
  };
  s.inputs = [v](Ctx& c) { return Spans{doubles(c.views[v].shaded), doubles(c.views[v].screen)}; };
  s.input_adjoints = [v](Ctx& c) { return Spans{doubles(c.views[v].shaded_bar), doubles(c.views[v].screen_bar)}; };
  s.outputs = [v](Ctx& c) { return Spans{doubles(c.views[v].image)}; };
  s.output_adjoints = [v](Ctx& c) { return Spans{doubles(c.views[v].image_bar)}; };
  s.signature = [v](const Ctx& c, Hasher& h) { c.views[v].plan.hash_into(h); };
  return s;
}

// ---------------------------------------------------------------------------

struct LossTerm {
  double scale;  // weight / N
  bool valid;
};

LossTerm loss_scale(const ViewLoss& loss, const Image& image) {
  if (!loss.reference.same_shape(image)) {
    throw PipelineError(fmt::format("reference image {}x{}x{} does not match camera image {}x{}x{}",
                                    loss.reference.width(), loss.reference.height(), loss.reference.channels(),
                                    image.width(), image.height(), image.channels()));
  }
  if (!loss.mask.empty() && (loss.mask.width() != image.width() || loss.mask.height() != image.height())) {
    throw PipelineError("loss mask size does not match the camera image");
  }
  long long count = 0;
  for (int p = 0; p < image.pixel_count(); ++p) {
    if (loss.mask.empty() || loss.mask(p) != 0.0) ++count;
  }
  count *= image.channels();
  return {count > 0 ? loss.weight / static_cast<double>(count) : 0.0, count > 0};
}

Stage<Ctx> image_loss_stage() {
  Stage<Ctx> s;
  s.name = "ImageLoss";
  s.forward = [](Ctx& c) {
    double total = 0.0;
    for (const ViewLoss& loss : c.losses) {
      const Image& img = c.views[loss.camera].image;
      const LossTerm term = loss_scale(loss, img);
      double acc = 0.0;
      for (int p = 0; p < img.pixel_count(); ++p) {
        if (!loss.mask.empty() && loss.mask(p) == 0.0) continue;
        for (int k = 0; k < img.channels(); ++k) {
          const double diff = img(p, k) - loss.reference(p, k);
          acc += diff * diff;
        }
      }
      total += term.scale * acc;
    }
    c.image_loss = total;
  };
  s.backward = [](Ctx& c) {
    for (const ViewLoss& loss : c.losses) {
      ViewPass& view = c.views[loss.camera];
      const LossTerm term = loss_scale(loss, view.image);
      const double g = c.image_loss_bar * term.scale * 2.0;
      for (int p = 0; p < view.image.pixel_count(); ++p) {
        if (!loss.mask.empty() && loss.mask(p) == 0.0) continue;
        for (int k = 0; k < view.image.channels(); ++k) {
          view.image_bar(p, k) += g * (view.image(p, k) - loss.reference(p, k));
        }
      }
    }
  };
  s.inputs = [](Ctx& c) {
    Spans in;
    for (ViewPass& view : c.views) in.push_back(doubles(view.image));
    return in;
  };
  s.input_adjoints = [](Ctx& c) {
    Spans in;
    for (ViewPass& view : c.views) in.push_back(doubles(view.image_bar));
    return in;
  };
  s.outputs = [](Ctx& c) { return Spans{doubles(c.image_loss)}; };
  s.output_adjoints = [](Ctx& c) { return Spans{doubles(c.image_loss_bar)}; };
  return s;
}

Stage<Ctx> normal_consistency_stage() {
  Stage<Ctx> s;
  s.name = "NormalConsistency";
  s.forward = [](Ctx& c) {
    c.regularizer_loss = 0.0;
    if (c.regularizer_edges.empty()) return;
    double acc = 0.0;
    for (const auto& [fa, fb] : c.regularizer_edges) {
      const Face& a = c.layout.faces[fa];
      const Face& b = c.layout.faces[fb];
      const Vec3 na = face_area_normal(c.world[a[0]], c.world[a[1]], c.world[a[2]]).normalized();
      const Vec3 nb = face_area_normal(c.world[b[0]], c.world[b[1]], c.world[b[2]]).normalized();
      acc += 1.0 - na.dot(nb);
    }
    c.regularizer_loss = c.regularizer.weight * acc / static_cast<double>(c.regularizer_edges.size());
  };
  s.backward = [](Ctx& c) {
    if (c.regularizer_edges.empty()) return;
    const double g = -c.regularizer_loss_bar * c.regularizer.weight / static_cast<double>(c.regularizer_edges.size());
    std::vector<Vec3> n_bar(c.layout.faces.size(), Vec3::Zero());
    auto unit = [&](int f) {
      const Face& face = c.layout.faces[f];
      return Vec3(face_area_normal(c.world[face[0]], c.world[face[1]], c.world[face[2]]).normalized());
    };
    for (const auto& [fa, fb] : c.regularizer_edges) {
      n_bar[fa] += g * unit(fb);
      n_bar[fb] += g * unit(fa);
    }
    for (std::size_t f = 0; f < n_bar.size(); ++f) {
      if (n_bar[f].squaredNorm() == 0.0) continue;
      const Face& face = c.layout.faces[f];
      const Vec3 cn = face_area_normal(c.world[face[0]], c.world[face[1]], c.world[face[2]]);
      const double len = cn.norm();
      face_normal_adjoint(c.world, face, normalize_adjoint(cn / len, len, n_bar[f]), c.world_bar);
    }
  };
  s.inputs = [](Ctx& c) { return Spans{doubles(c.world)}; };
  s.input_adjoints = [](Ctx& c) { return Spans{doubles(c.world_bar)}; };
  s.outputs = [](Ctx& c) { return Spans{doubles(c.regularizer_loss)}; };
  s.output_adjoints = [](Ctx& c) { return Spans{doubles(c.regularizer_loss_bar)}; };
  return s;
}

Stage<Ctx> total_loss_stage() {
  Stage<Ctx> s;
  s.name = "TotalLoss";
  s.forward = [](Ctx& c) { c.loss = c.image_loss + c.regularizer_loss; };
  s.backward = [](Ctx& c) {
    c.image_loss_bar += c.loss_bar;
    c.regularizer_loss_bar += c.loss_bar;
  };
  s.inputs = [](Ctx& c) { return Spans{doubles(c.image_loss), doubles(c.regularizer_loss)}; };
  s.input_adjoints = [](Ctx& c) { return Spans{doubles(c.image_loss_bar), doubles(c.regularizer_loss_bar)}; };
  s.outputs = [](Ctx& c) { return Spans{doubles(c.loss)}; };
  s.output_adjoints = [](Ctx& c) { return Spans{doubles(c.loss_bar)}; };
  return s;
}

}  // namespace

Pipeline<RenderContext> build_render_pipeline(const Scene& scene) {
  Pipeline<RenderContext> p;
  const int lights = static_cast<int>(scene.lights.size());
  const int cameras = static_cast<int>(scene.cameras.size());
  const bool shadows = scene.settings.shadows;
  p.add(scatter_stage());
  for (int l = 0; l < lights; ++l) {
    p.add(light_frame_stage(l));
    if (!shadows) continue;
    p.add(light_project_stage(l));
    p.add(shadow_raster_stage(l));
    p.add(shadow_antialias_stage(l));
    p.add(moments_stage(l));
  }
  for (int v = 0; v < cameras; ++v) {
    p.add(camera_project_stage(v));
    p.add(gbuffer_stage(v));
    if (shadows) {
      for (int l = 0; l < lights; ++l) p.add(visibility_stage(v, l));
    }
    p.add(shade_stage(v));
    p.add(camera_antialias_stage(v));
  }
  p.add(image_loss_stage());
  p.add(normal_consistency_stage());
  p.add(total_loss_stage());
  return p;
}

Renderer::Renderer(Scene scene, std::vector<ViewLoss> losses, RegularizerSpec regularizer)
    : base_(std::move(scene)), pipeline_(build_render_pipeline(base_)) {
  base_.validate();
  ctx_.scene = base_;
  ctx_.layout = base_.layout();
  ctx_.topology = EdgeTopology(ctx_.layout.faces, ctx_.layout.vertex_offset.back());
  ctx_.lights.resize(base_.lights.size());
  ctx_.views.resize(base_.cameras.size());
  const int light_count = base_.settings.shadows ? static_cast<int>(base_.lights.size()) : 0;
  for (ViewPass& view : ctx_.views) {
    view.visibility.resize(light_count);
    view.visibility_bar.resize(light_count);
    view.queries.resize(light_count);
  }
  ctx_.regularizer = regularizer;
  if (regularizer.mesh >= 0 && regularizer.weight != 0.0) {
    if (regularizer.mesh >= static_cast<int>(base_.meshes.size())) throw ConfigError("regularizer mesh out of range");
    const int f0 = ctx_.layout.face_offset[regularizer.mesh], f1 = ctx_.layout.face_offset[regularizer.mesh + 1];
    for (int e = 0; e < ctx_.topology.edge_count(); ++e) {
      const auto& faces = ctx_.topology.edge_faces(e);
      if (faces.size() == 2 && faces[0] >= f0 && faces[0] < f1) ctx_.regularizer_edges.push_back({faces[0], faces[1]});
    }
  }
  set_losses(std::move(losses));
  ctx_.params = initial_parameters();
}

void Renderer::set_losses(std::vector<ViewLoss> losses) {
  for (const ViewLoss& l : losses) {
    if (l.camera < 0 || l.camera >= static_cast<int>(base_.cameras.size())) throw ConfigError("loss camera out of range");
  }
  ctx_.losses = std::move(losses);
}

void Renderer::set_reference(int loss_index, Image reference) { ctx_.losses.at(loss_index).reference = std::move(reference); }

double Renderer::forward(std::span<const double> params) {
  ctx_.params.assign(params.begin(), params.end());
  pipeline_.forward(ctx_);
  return ctx_.loss;
}

double Renderer::evaluate(std::span<const double> params, std::vector<double>& grad) {
  ctx_.params.assign(params.begin(), params.end());
  StageTape tape = pipeline_.forward(ctx_);
  pipeline_.backward(ctx_, tape);
  grad = ctx_.grad;
  return ctx_.loss;
}

void Renderer::render() {
  const std::vector<double> params = ctx_.params;
  forward(params);
}

std::vector<Vec3> Renderer::world_positions(int mesh) const {
  const int v0 = ctx_.layout.vertex_offset.at(mesh), v1 = ctx_.layout.vertex_offset.at(mesh + 1);
  return {ctx_.world.begin() + v0, ctx_.world.begin() + v1};
}

}  // namespace umbra
