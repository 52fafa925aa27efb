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

#include "umbra/experiments/config.hpp"
#include "umbra/io/image_io.hpp"
#include "umbra/scene/obj.hpp"
#include "umbra/scene/scene_io.hpp"
#include "umbra/service/server.hpp"
#include "umbra/shade/shading.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace umbra {
namespace {

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int shadow_res = 0;
  std::string kernel;
  int kernel_size = 0;
  bool no_antialias = false;
  bool no_shadows = false;

  // Populated after parsing.
  json doc;
  CommonOverrides overrides;
};

void add_common(CLI::App& cmd, Common& c, bool with_seed = true) {
  cmd.add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  cmd.add_option("--out", c.out, "output directory");
  if (with_seed) cmd.add_option("--seed", c.seed, "random seed");
  cmd.add_option("--shadow-res", c.shadow_res, "shadow map resolution");
  cmd.add_option("--kernel", c.kernel, "filter kernel shape")->check(CLI::IsMember({"box", "gaussian"}));
  cmd.add_option("--kernel-size", c.kernel_size, "filter kernel size (odd)");
  cmd.add_flag("--no-antialias", c.no_antialias, "disable shadow map antialiasing");
  cmd.add_flag("--no-shadows", c.no_shadows, "render without shadows");
}

void finalize(CLI::App& cmd, Common& c, const std::string& name) {
  if (!c.config.empty()) c.doc = load_json(c.config);
  if (cmd.get_option_no_throw("--seed") && cmd.count("--seed")) c.overrides.seed = c.seed;
  if (cmd.count("--shadow-res")) c.overrides.shadow_resolution = c.shadow_res;
  if (!c.kernel.empty()) c.overrides.kernel_shape = parse_kernel_shape(c.kernel);
  if (cmd.count("--kernel-size")) c.overrides.kernel_size = c.kernel_size;
  c.overrides.no_antialias = c.no_antialias;
  c.overrides.no_shadows = c.no_shadows;
  if (c.out.empty()) c.out = (fs::path("out") / name).string();
  fs::create_directories(c.out);
}

std::string path_in(const Common& c, const std::string& file) { return (fs::path(c.out) / file).string(); }

void save_image(const std::string& path, const Image& image, double gamma = 1.0) {
  save_png(path, to_image8(image, gamma));
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << j.dump(2) << '\n';
}

int verdict(bool ok, const std::string& what) {
  fmt::print("{}: {}\n", ok ? "PASS" : "FAIL", what);
  return ok ? 0 : 1;
}

json trace_json(const Trace& t) {
  return {{"iterations", t.records.size()},
          {"final_loss", t.final_loss()},
          {"aborted", t.aborted},
          {"hash", fmt::format("{:016x}", t.hash())}};
}

// --- gradcheck ------------------------------------------------------------

int cmd_gradcheck(Common& c) {
  const GradcheckConfig config = gradcheck_config(c.doc, c.overrides);
  const GradcheckReport report = run_gradcheck(config);

  fmt::print("{:<28} {:>8} {:>8} {:>8} {:>8} {:>8} {:>12}\n", "stage", "accepted", "trivial", "excluded", "refined",
             "failed", "max_rel_err");
  auto row = [](const CheckRow& r) {
    fmt::print("{:<28} {:>8} {:>8} {:>8} {:>8} {:>8} {:>12.3e}\n", r.name, r.accepted, r.trivial, r.excluded,
               r.refined, r.failed, r.max_rel_error);
  };
  json rows = json::array();
  auto to_json = [](const CheckRow& r) {
    return json{{"name", r.name},         {"accepted", r.accepted}, {"trivial", r.trivial},
                {"excluded", r.excluded}, {"refined", r.refined},   {"failed", r.failed},
                {"max_rel_error", r.max_rel_error}};
  };
  for (const CheckRow& r : report.stages) {
    row(r);
    rows.push_back(to_json(r));
  }
  row(report.end_to_end);

  Renderer renderer = make_gradcheck_renderer(config);
  renderer.render();
  const int spot_x = renderer.base_scene().parameters.offset_of(BindingKind::kLightPosition, kGradcheckSpotLight);
  const Image grad = visibility_gradient_image(renderer, 0, kGradcheckSpotLight, spot_x);
  const Image& vis = renderer.visibility(0, kGradcheckSpotLight);
  const BandStats band = gradient_band_stats(grad, vis);
  save_image(path_in(c, "visibility.png"), vis);
  save_image(path_in(c, "gradient_spot_x.png"), signed_to_gray(grad));
  save_image(path_in(c, "gradient_spot_x_abs.png"), normalize_abs(grad));
  save_raw(path_in(c, "gradient_spot_x.raw"), grad);
  fmt::print("spot light x gradient: {} nonzero pixels, {:.1f}% inside the penumbra band, {:.1f}% of the band covered\n",
             band.nonzero, 100.0 * band.nonzero_in_band, 100.0 * band.band_covered);

  const AntialiasDiagnostic diag = antialias_diagnostic(config.kernel.size);
  fmt::print("minimal-plane translation gradient: antialias ({:.3e}, {:.3e}), no antialias ({:.3e}, {:.3e})\n",
             diag.with_antialias.x(), diag.with_antialias.y(), diag.without_antialias.x(),
             diag.without_antialias.y());

  write_json(path_in(c, "gradcheck.json"),
             {{"stages", rows},
              {"end_to_end", to_json(report.end_to_end)},
              {"band", {{"nonzero", band.nonzero}, {"in_band", band.nonzero_in_band}, {"covered", band.band_covered}}},
              {"antialias_diagnostic",
               {{"with", {diag.with_antialias.x(), diag.with_antialias.y()}},
                {"without", {diag.without_antialias.x(), diag.without_antialias.y()}}}},
              {"pass", report.pass}});
  return verdict(report.pass, fmt::format("all stages within {:.0f}% on >= {} samples", 100.0 * config.tolerance,
                                          config.samples));
}

// --- minimal plane ----------------------------------------------------------

constexpr double kConverged = 0.01;

json result_json(const MinimalPlaneResult& r) {
  return {{"initial_error", r.initial_error},
          {"final_error", r.final_error},
          {"final_loss", r.final_loss},
          {"final_offset", {r.final_offset.x(), r.final_offset.y()}},
          {"trace", trace_json(r.trace)}};
}

int minimal_single(Common& c) {
  const MinimalPlaneConfig config = minimal_plane_config(c.doc, c.overrides);
  const MinimalPlaneResult r = run_minimal_plane(config);
  save_trace_jsonl(r.trace, path_in(c, "trace.jsonl"));
  fmt::print("k={} antialias={}: error {:.5f} -> {:.5f} after {} iterations (loss {:.3e})\n", config.scene.kernel.size,
             config.scene.antialias, r.initial_error, r.final_error, r.trace.records.size(), r.final_loss);
  json summary = result_json(r);
  if (config.scene.antialias) {
    write_json(path_in(c, "summary.json"), summary);
    return verdict(r.final_error < kConverged, fmt::format("final error below {}", kConverged));
  }
  // Without antialiasing the run is expected to fail; compare it with the
  // smoothed run from the same start.
  MinimalPlaneConfig smooth = config;
  smooth.scene.antialias = true;
  const MinimalPlaneResult s = run_minimal_plane(smooth);
  fmt::print("same start with antialias: final error {:.5f}\n", s.final_error);
  summary["smooth"] = result_json(s);
  write_json(path_in(c, "summary.json"), summary);
  return verdict(r.final_error > 10.0 * s.final_error, "no-antialias error exceeds 10x the antialiased run");
}

int minimal_kernels(Common& c, const std::vector<int>& kernels) {
  const MinimalPlaneConfig base = minimal_plane_config(c.doc, c.overrides);
  const std::vector<ConvergenceRow> rows = run_convergence_study(base, kernels);
  json out = json::array();
  bool ok = true;
  fmt::print("{:>4} {:>14} {:>14} {:>8}\n", "k", "antialias", "no antialias", "ratio");
  for (const ConvergenceRow& row : rows) {
    const double ratio = row.plain.final_error / std::max(row.smooth.final_error, 1e-300);
    fmt::print("{:>4} {:>14.5f} {:>14.5f} {:>8.1f}\n", row.kernel_size, row.smooth.final_error,
               row.plain.final_error, ratio);
    ok = ok && row.smooth.final_error < kConverged && row.plain.final_error > 10.0 * row.smooth.final_error;
    save_trace_jsonl(row.smooth.trace, path_in(c, fmt::format("trace_k{}_antialias.jsonl", row.kernel_size)));
    save_trace_jsonl(row.plain.trace, path_in(c, fmt::format("trace_k{}_plain.jsonl", row.kernel_size)));
    out.push_back({{"k", row.kernel_size}, {"antialias", result_json(row.smooth)}, {"plain", result_json(row.plain)}});
  }
  write_json(path_in(c, "kernels.json"), out);
  return verdict(ok, "antialias converges and no-antialias fails by 10x for every k");
}

int minimal_robustness(Common& c) {
  const RobustnessConfig config = robustness_config(c.doc, c.overrides);
  const std::vector<RobustnessRow> rows = run_robustness(config);
  json out = json::array();
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    fmt::print("k={:>3}: max convergent offset {:.3f} (errors:", rows[i].kernel_size, rows[i].max_offset);
    for (double e : rows[i].final_errors) fmt::print(" {:.4f}", e);
    fmt::print(")\n");
    if (i > 0 && rows[i].max_offset < rows[i - 1].max_offset) monotone = false;
    out.push_back({{"k", rows[i].kernel_size}, {"max_offset", rows[i].max_offset}, {"errors", rows[i].final_errors}});
  }
  write_json(path_in(c, "robustness.json"), out);
  return verdict(monotone, "max convergent offset non-decreasing in k");
}

// --- light estimation -------------------------------------------------------

json vec_list(const std::vector<Vec3>& v) {
  json a = json::array();
  for (const Vec3& d : v) a.push_back({d.x(), d.y(), d.z()});
  return a;
}

int cmd_light_estimation(Common& c) {
  const LightEstimationConfig config = light_estimation_config(c.doc, c.overrides);
  const LightSummary summary = run_light_estimation(config);
  std::ofstream runs(path_in(c, "runs.jsonl"));
  for (std::size_t i = 0; i < summary.runs.size(); ++i) {
    const LightRun& r = summary.runs[i];
    fmt::print("run {:>2}: alignment {:.4f} -> {:.4f}\n", i, r.initial_alignment, r.alignment);
    runs << json{{"run", i},
                 {"targets", vec_list(r.targets)},
                 {"initial", vec_list(r.initial)},
                 {"estimates", vec_list(r.estimates)},
                 {"initial_alignment", r.initial_alignment},
                 {"alignment", r.alignment},
                 {"trace_hash", fmt::format("{:016x}", r.trace_hash)}}
                .dump()
         << '\n';
  }
  const double threshold = config.lights == 1 ? 0.99 : 0.9;
  fmt::print("n={} mean alignment {:.4f} over {} runs\n", config.lights, summary.mean_alignment, summary.runs.size());
  write_json(path_in(c, "summary.json"), {{"lights", config.lights}, {"mean_alignment", summary.mean_alignment}});
  return verdict(summary.mean_alignment > threshold, fmt::format("mean alignment above {}", threshold));
}

// --- pose -------------------------------------------------------------------

json pose_json(const PoseSummary& s) {
  json runs = json::array();
  for (const PoseRun& r : s.runs) {
    runs.push_back({{"target", {r.target.tx, r.target.ty, r.target.phi}},
                    {"recovered", {r.recovered.tx, r.recovered.ty, r.recovered.phi}},
                    {"rotation_error_deg", r.rotation_error_deg},
                    {"translation_error", r.translation_error},
                    {"seconds_per_iteration", r.seconds_per_iteration},
                    {"trace_hash", fmt::format("{:016x}", r.trace_hash)}});
  }
  return {{"runs", runs},
          {"mean_rotation_error_deg", s.mean_rotation_error_deg},
          {"mean_translation_error", s.mean_translation_error},
          {"scene_extent", s.scene_extent},
          {"mean_seconds_per_iteration", s.mean_seconds_per_iteration}};
}

void print_pose(const char* label, const PoseSummary& s) {
  fmt::print("{}: mean dphi {:.4f} deg, mean dt {:.5f} ({:.3f}% of extent {:.3f}), {:.1f} ms/iteration\n", label,
             s.mean_rotation_error_deg, s.mean_translation_error, 100.0 * s.mean_translation_error / s.scene_extent,
             s.scene_extent, 1e3 * s.mean_seconds_per_iteration);
}

bool pose_accurate(const PoseSummary& s) {
  return s.mean_rotation_error_deg <= 0.5 && s.mean_translation_error <= 0.005 * s.scene_extent;
}

int cmd_pose(Common& c, bool compare) {
  PoseConfig config = pose_config(c.doc, c.overrides);
  if (!compare) {
    const PoseSummary s = run_pose_estimation(config);
    print_pose(config.scene.shadows ? "shadows" : "no shadows", s);
    write_json(path_in(c, "summary.json"), pose_json(s));
    if (!config.scene.shadows) return 0;
    return verdict(pose_accurate(s), "mean dphi <= 0.5 deg and mean dt <= 0.5% of extent");
  }
  config.scene.shadows = true;
  const PoseSummary with = run_pose_estimation(config);
  config.scene.shadows = false;
  const PoseSummary without = run_pose_estimation(config);
  print_pose("shadows", with);
  print_pose("no shadows", without);
  write_json(path_in(c, "summary.json"), {{"shadows", pose_json(with)}, {"no_shadows", pose_json(without)}});
  const bool ok = pose_accurate(with) && without.mean_rotation_error_deg >= 5.0 * with.mean_rotation_error_deg;
  return verdict(ok, "accurate with shadows and at least 5x worse rotation without");
}

// --- shadow art -------------------------------------------------------------

int cmd_shadow_art(Common& c, int snapshot_every) {
  const ShadowArtConfig config = shadow_art_config(c.doc, c.overrides);
  RunOptions options;
  options.iterations = config.iterations;
  options.optimizer = config.optimizer;
  options.snapshot_every = snapshot_every;
  const ShadowArtResult r = run_shadow_art(config, &options);
  save_trace_jsonl(r.trace, path_in(c, "trace.jsonl"));
  save_obj(path_in(c, "mesh.obj"), r.mesh);
  if (snapshot_every > 0) {
    ShadowArtProblem problem(config);
    for (const auto& [iteration, u] : r.trace.snapshots) {
      save_obj(path_in(c, fmt::format("mesh_{:04d}.obj", iteration)), problem.mesh(u));
    }
  }
  bool ok = !r.trace.aborted;
  const double threshold = config.views == 1 ? 0.9 : 0.85;
  json views = json::array();
  for (int v = 0; v < config.views; ++v) {
    save_image(path_in(c, fmt::format("shadow_{}.png", v)), r.shadows[v]);
    save_image(path_in(c, fmt::format("target_{}.png", v)), r.targets[v]);
    fmt::print("view {}: IoU {:.4f} -> {:.4f}\n", v, r.initial_iou[v], r.iou[v]);
    ok = ok && r.iou[v] > threshold;
    views.push_back({{"initial_iou", r.initial_iou[v]}, {"iou", r.iou[v]}});
  }
  if (r.trace.aborted) fmt::print("run aborted: {}\n", r.trace.message);
  fmt::print("final loss {:.4e} after {} iterations, {:.1f} s\n", r.trace.final_loss(), r.trace.records.size(),
             r.trace.records.empty() ? 0.0 : r.trace.records.back().seconds);
  write_json(path_in(c, "summary.json"), {{"views", views}, {"trace", trace_json(r.trace)}});
  return verdict(ok, fmt::format("every view IoU above {}", threshold));
}

// --- render -----------------------------------------------------------------

Image side_by_side(const std::vector<Image>& panels) {
  int w = 0;
  const int h = panels.front().height();
  for (const Image& p : panels) w += p.width();
  Image out(w, h, 1);
  int x0 = 0;
  for (const Image& p : panels) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < p.width(); ++x) out.at(x0 + x, y) = p.at(x, y);
    }
    x0 += p.width();
  }
  return out;
}

int render_scene_file(Common& c, const std::string& path, double gamma) {
  Scene scene = load_scene(path);
  if (c.no_antialias) scene.settings.antialias = false;
  if (c.no_shadows) scene.settings.shadows = false;
  for (LightSource& light : scene.lights) {
    if (c.overrides.shadow_resolution) light.shadow_resolution = *c.overrides.shadow_resolution;
    if (c.overrides.kernel_shape) light.kernel.shape = *c.overrides.kernel_shape;
    if (c.overrides.kernel_size) light.kernel.size = *c.overrides.kernel_size;
  }
  Renderer renderer(scene);
  renderer.render();
  for (int cam = 0; cam < static_cast<int>(scene.cameras.size()); ++cam) {
    save_image(path_in(c, fmt::format("camera{}.png", cam)), renderer.image(cam), gamma);
    save_raw(path_in(c, fmt::format("camera{}.raw", cam)), renderer.image(cam));
    if (!scene.settings.shadows) continue;
    for (int l = 0; l < static_cast<int>(scene.lights.size()); ++l) {
      save_image(path_in(c, fmt::format("visibility_c{}_l{}.png", cam, l)), renderer.visibility(cam, l));
    }
  }
  if (scene.settings.shadows) {
    for (int l = 0; l < static_cast<int>(scene.lights.size()); ++l) {
      save_raw(path_in(c, fmt::format("moments_l{}.raw", l)), renderer.moments(l));
    }
  }
  fmt::print("rendered {} camera(s), {} light(s) to {}\n", scene.cameras.size(), scene.lights.size(), c.out);
  return 0;
}

int cmd_render(Common& c, std::string scene_path, std::optional<double> bias_flag, double gamma) {
  if (scene_path.empty() && c.doc.contains("scene")) {
    scene_path = (fs::path(c.config).parent_path() / c.doc.at("scene").get<std::string>()).string();
  }
  if (!scene_path.empty()) return render_scene_file(c, scene_path, gamma);
  if (c.no_shadows) throw ConfigError("--no-shadows does not apply to the comparison render");

  AcneSceneOptions options = acne_config(c.doc, c.overrides);
  double bias = c.doc.is_object() ? c.doc.value("bias", 0.01) : 0.01;
  if (bias_flag) bias = *bias_flag;
  if (bias < 0.0) throw ConfigError("--classic-bias must be non-negative");
  Scene scene = make_acne_scene(options);
  if (c.doc.contains("background")) scene.settings.background = vec3_from_json(c.doc.at("background"));
  if (c.no_antialias) scene.settings.antialias = false;
  const ShadowComparison cmp = compare_shadows(scene, bias);
  save_image(path_in(c, "classic.png"), cmp.classic);
  save_image(path_in(c, "biased.png"), cmp.biased);
  save_image(path_in(c, "variance.png"), cmp.variance);
  save_image(path_in(c, "comparison.png"), side_by_side({cmp.classic, cmp.biased, cmp.variance}));
  save_image(path_in(c, "shaded.png"), cmp.shaded, gamma);
  save_raw(path_in(c, "variance.raw"), cmp.variance);
  save_raw(path_in(c, "moments.raw"), cmp.moments);

  // Acne is counted on the same scene without the box, where every covered
  // pixel is lit.
  options.occluder = false;
  Scene open = make_acne_scene(options);
  if (c.no_antialias) open.settings.antialias = false;
  const ShadowComparison lit = compare_shadows(open, bias);
  fmt::print("{} covered pixels; dark pixels with box: classic {}, biased {}, variance {}\n", cmp.covered,
             cmp.dark_classic, cmp.dark_biased, cmp.dark_variance);
  fmt::print("acne pixels without box: classic {}, biased (bias {}) {}, variance {}\n", lit.dark_classic, bias,
             lit.dark_biased, lit.dark_variance);
  write_json(path_in(c, "summary.json"),
             {{"bias", bias},
              {"covered", cmp.covered},
              {"dark", {{"classic", cmp.dark_classic}, {"biased", cmp.dark_biased}, {"variance", cmp.dark_variance}}},
              {"acne", {{"classic", lit.dark_classic}, {"biased", lit.dark_biased}, {"variance", lit.dark_variance}}}});
  return verdict(lit.dark_classic > 0 && lit.dark_biased == 0 && lit.dark_variance == 0,
                 "acne only in the unbiased classic panel");
}

// --- serve ------------------------------------------------------------------

int cmd_serve(Common& c, CLI::App& cmd, std::string host, int port, int frame_res, int threads) {
  service::ServerOptions options;
  if (c.doc.is_object()) {
    for (const auto& [key, value] : c.doc.items()) {
      if (key == "host") {
        options.host = value.get<std::string>();
      } else if (key == "port") {
        options.port = value.get<unsigned short>();
      } else if (key == "threads") {
        options.threads = value.get<int>();
      } else if (key == "session") {
        options.defaults = service::settings_from_json(value, options.defaults);
      } else {
        throw ConfigError(fmt::format("serve: unknown key '{}'", key));
      }
    }
  }
  if (cmd.count("--host")) options.host = host;
  if (cmd.count("--port")) options.port = static_cast<unsigned short>(port);
  if (cmd.count("--threads")) options.threads = threads;
  if (cmd.count("--frame-res")) options.defaults.frame_resolution = frame_res;
  if (c.overrides.shadow_resolution) options.defaults.shadow_resolution = *c.overrides.shadow_resolution;
  if (c.overrides.kernel_size) options.defaults.kernel_size = *c.overrides.kernel_size;
  if (c.overrides.kernel_shape || c.no_antialias || c.no_shadows) {
    throw ConfigError("serve accepts only --shadow-res and --kernel-size among the render overrides");
  }
  options.defaults = service::settings_from_json(json::object(), options.defaults);

  // Block the termination signals in every thread and wait for them here.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::Server server(options);
  const unsigned short bound = server.listen();
  fmt::print("listening on {}:{} (ws://{}:{}/session, GET /meshes)\n", options.host, bound, options.host, bound);
  std::fflush(stdout);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace
}  // namespace umbra

int main(int argc, char** argv) {
  using namespace umbra;
  CLI::App app{"Differentiable shadow mapping experiments"};
  app.require_subcommand(1);

  Common gc, mp, le, pe, sa, rd, sv;

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "compare adjoints with finite differences");
  add_common(*gradcheck, gc);

  CLI::App* minimal = app.add_subcommand("minimal-plane", "single occluder over a receiver");
  add_common(*minimal, mp);
  std::string study = "single";
  std::vector<int> kernels = {1, 3, 9, 15};
  minimal->add_option("--study", study, "single, kernels or robustness")
      ->check(CLI::IsMember({"single", "kernels", "robustness"}));
  minimal->add_option("--kernels", kernels, "kernel sizes for the kernels study");

  CLI::App* light = app.add_subcommand("light-estimation", "recover directional light directions");
  add_common(*light, le);

  CLI::App* pose = app.add_subcommand("pose-estimation", "recover an object pose from a self-rendered reference");
  add_common(*pose, pe);
  bool compare = false;
  pose->add_flag("--compare", compare, "run with and without shadows");

  CLI::App* art = app.add_subcommand("shadow-art", "deform a sphere to cast target shadows");
  add_common(*art, sa);
  int snapshot_every = 0;
  art->add_option("--snapshot-every", snapshot_every, "write an OBJ every N iterations");

  CLI::App* render = app.add_subcommand("render", "classic vs variance shadow comparison, or a scene file");
  add_common(*render, rd);
  std::string scene_path;
  double bias = 0.0;
  double gamma = 1.0;
  render->add_option("--scene", scene_path, "scene description (JSON)")->check(CLI::ExistingFile);
  CLI::Option* bias_opt = render->add_option("--classic-bias", bias, "depth bias for the classic panel");
  render->add_option("--gamma", gamma, "gamma applied to shaded PNG exports");

  CLI::App* serve = app.add_subcommand("serve", "interactive shadow modeling service");
  add_common(*serve, sv, false);
  std::string host = "127.0.0.1";
  int port = 8080;
  int frame_res = 128;
  int threads = 1;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--frame-res", frame_res, "session frame resolution");
  serve->add_option("--threads", threads, "network threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gradcheck->parsed()) {
      finalize(*gradcheck, gc, "gradcheck");
      return cmd_gradcheck(gc);
    }
    if (minimal->parsed()) {
      finalize(*minimal, mp, "minimal-plane");
      if (study == "kernels") return minimal_kernels(mp, kernels);
      if (study == "robustness") return minimal_robustness(mp);
      return minimal_single(mp);
    }
    if (light->parsed()) {
      finalize(*light, le, "light-estimation");
      return cmd_light_estimation(le);
    }
    if (pose->parsed()) {
      finalize(*pose, pe, "pose-estimation");
      return cmd_pose(pe, compare);
    }
    if (art->parsed()) {
      finalize(*art, sa, "shadow-art");
      return cmd_shadow_art(sa, snapshot_every);
    }
    if (render->parsed()) {
      finalize(*render, rd, "render");
      std::optional<double> b;
      if (bias_opt->count()) b = bias;
      return cmd_render(rd, scene_path, b, gamma);
    }
    if (serve->parsed()) {
      finalize(*serve, sv, "serve");
      return cmd_serve(sv, *serve, host, port, frame_res, threads);
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
