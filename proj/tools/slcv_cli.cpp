// slcv command-line front end: batch calibration, scene simulation,
// cost-surface export, and result evaluation over JSON/CSV files.

#include "slcv/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

/// Exit-code contract: 0 success, 1 input/usage error, 2 infeasible/degenerate.
int classify(const slcv::Error& e) {
  switch (e.code()) {
    case slcv::Errc::InvalidInput:
    case slcv::Errc::Mismatch:
    case slcv::Errc::NoObservations:
      return 1;
    default:
      return 2;
  }
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - out.mean) * (x - out.mean);
  out.stddev = std::sqrt(acc / static_cast<double>(v.size()));
  return out;
}

void emit(const std::string& output_path, const std::string& text) {
  if (output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output_path, std::ios::binary);
    if (!out) slcv::fail(slcv::Errc::InvalidInput, "cannot open output file: " + output_path);
    out << text;
    if (!out) slcv::fail(slcv::Errc::InvalidInput, "write failed: " + output_path);
  }
}

/// Same triple selection the calibration pipeline performs, so the exported
/// surface and the calibrated z0 agree.
slcv::CostContext select_context(const slcv::ProjectiveReconstruction& recon,
                                 const slcv::CostWeights& weights,
                                 const std::array<int, 3>& triple, std::uint64_t seed) {
  std::vector<std::array<int, 3>> candidates;
  if (triple[0] >= 0 || triple[1] >= 0 || triple[2] >= 0)
    candidates.push_back(triple);
  else
    candidates = {{0, 1, 2}, {1, 0, 2}, {2, 0, 1}};
  for (const std::array<int, 3>& tr : candidates) {
    slcv::CostContext context = slcv::make_cost_context(recon, weights, tr, seed);
    if (context.triple.generic[0]) return context;
  }
  slcv::fail(slcv::Errc::NonGenericConfiguration,
             "no admissible camera triple among the tried permutations");
}

struct CommonFlags {
  std::string input;
  std::string output;
  std::vector<int> grid = {50, 50};
  std::string method = "slcv";
  std::vector<double> box = {-1, 1, -1, 1, -1, 1};
  int steps = 20;
  std::vector<double> weights = {1, 1, 1, 1};
  std::vector<int> triple = {-1, -1, -1};
  std::uint64_t seed = 0x51C5EEDULL;
};

slcv::CostWeights to_weights(const std::vector<double>& w) {
  return slcv::CostWeights{w[0], w[1], w[2], w[3]};
}

slcv::PlaneBox to_box(const std::vector<double>& b) {
  slcv::PlaneBox box;
  box.lo = slcv::Vec3(b[0], b[2], b[4]);
  box.hi = slcv::Vec3(b[1], b[3], b[5]);
  return box;
}

int run_calibrate(const CommonFlags& flags) {
  const slcv::SceneFile scene = slcv::read_scene(flags.input);
  slcv::ResultFile out;
  out.grid = slcv::GridSpec{flags.grid[0], flags.grid[1]};

  if (flags.method == "slcv") {
    slcv::CalibrateConfig cfg;
    cfg.grid = out.grid;
    cfg.weights = to_weights(flags.weights);
    cfg.triple = {flags.triple[0], flags.triple[1], flags.triple[2]};
    cfg.seed = flags.seed;
    out.result = slcv::calibrate_slcv(scene.recon, cfg);
  } else if (flags.method == "daq") {
    out.result = slcv::calibrate_daq(scene.recon);
  } else if (flags.method == "grid3d") {
    out.result = slcv::calibrate_grid3d(scene.recon, to_box(flags.box), flags.steps);
  } else {
    slcv::fail(slcv::Errc::InvalidInput, "unknown method: " + flags.method);
  }

  if (scene.recon.triplets.size() >= 2)
    out.sigma_mu = slcv::segment_length_stats(scene.recon.points, scene.recon.triplets,
                                              out.result.h)
                       .ratio;

  emit(flags.output, slcv::serialize_result(out));
  if (!flags.output.empty()) {
    std::printf("calibrated %zu cameras (method %s): cost %.6g, rms %.6g\n",
                out.result.cameras.size(), out.result.diagnostics.method.c_str(),
                out.result.diagnostics.final_cost, out.result.reprojection_rms);
  }
  return 0;
}

int run_simulate(const CommonFlags& flags, const slcv::SceneSpec& spec) {
  const slcv::Scene scene = slcv::make_scene(spec);
  emit(flags.output, slcv::serialize_scene(scene.recon, &scene.truth));
  return 0;
}

int run_cost_surface(const CommonFlags& flags) {
  const slcv::SceneFile scene = slcv::read_scene(flags.input);
  const slcv::CostContext context =
      select_context(scene.recon, to_weights(flags.weights),
                     {flags.triple[0], flags.triple[1], flags.triple[2]}, flags.seed);
  const slcv::GridSpec spec{flags.grid[0], flags.grid[1]};
  const slcv::GridResult grid = slcv::grid_search(context, spec);
  std::ostringstream csv;
  slcv::write_cost_surface_csv(csv, spec, grid);
  emit(flags.output, csv.str());
  return 0;
}

int run_evaluate(const CommonFlags& flags, const std::vector<std::string>& result_paths) {
  const slcv::SceneFile scene = slcv::read_scene(flags.input);
  if (!scene.truth)
    slcv::fail(slcv::Errc::InvalidInput, "evaluation needs a scene file with a ground_truth block");

  json report = json::array();
  for (const std::string& path : result_paths) {
    const slcv::ResultFile rf = slcv::read_result(path);
    const slcv::ScoreReport sc = slcv::score(rf.result, *scene.truth, &scene.recon);
    const MeanStd focal = mean_std(sc.focal_rel_err);
    const MeanStd pp = mean_std(sc.pp_err_px);

    std::printf("method %s (%s)\n", rf.result.diagnostics.method.c_str(), path.c_str());
    std::printf("  focal relative error: mean %.6g  std %.6g  max %.6g\n", focal.mean,
                focal.stddev, sc.max_focal_rel_err);
    std::printf("  principal point error [px]: mean %.6g  std %.6g  max %.6g\n", pp.mean,
                pp.stddev, sc.max_pp_err_px);
    std::printf("  plane angular error: %.6g\n", sc.plane_angular_err);
    std::printf("  reprojection rms [px]: %.6g\n", sc.reprojection_rms);
    std::printf("  bar length sigma/mu: %.6g\n", sc.sigma_mu);

    json entry;
    entry["result_file"] = path;
    entry["method"] = rf.result.diagnostics.method;
    entry["focal_rel_err"] = {{"mean", focal.mean}, {"std", focal.stddev},
                              {"max", sc.max_focal_rel_err}};
    entry["pp_err_px"] = {{"mean", pp.mean}, {"std", pp.stddev}, {"max", sc.max_pp_err_px}};
    entry["plane_angular_err"] = sc.plane_angular_err;
    entry["rms"] = std::isfinite(sc.reprojection_rms) ? json(sc.reprojection_rms) : json();
    entry["sigma_mu"] = std::isfinite(sc.sigma_mu) ? json(sc.sigma_mu) : json();
    report.push_back(entry);
  }
  if (!flags.output.empty()) emit(flags.output, report.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euclidean upgrading of projective multi-camera reconstructions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML configuration file; flags take precedence");

  CommonFlags flags;
  slcv::SceneSpec spec;
  std::vector<std::string> result_paths;
  std::vector<double> focal_range = {spec.focal_range(0), spec.focal_range(1)};
  std::vector<double> pp_offset = {spec.pp_offset_range(0), spec.pp_offset_range(1)};
  std::vector<double> image_size = {spec.image_width, spec.image_height};

  CLI::App* cal = app.add_subcommand("calibrate", "Upgrade a reconstruction to Euclidean");
  cal->add_option("--input", flags.input, "Reconstruction JSON file")->required();
  cal->add_option("--output", flags.output, "Result JSON file (default: stdout)");
  cal->add_option("--grid", flags.grid, "Search grid N,M")->delimiter(',')->expected(2);
  cal->add_option("--method", flags.method, "slcv | daq | grid3d")
      ->check(CLI::IsMember({"slcv", "daq", "grid3d"}));
  cal->add_option("--box", flags.box, "grid3d box xmin,xmax,ymin,ymax,zmin,zmax")
      ->delimiter(',')
      ->expected(6);
  cal->add_option("--steps", flags.steps, "grid3d samples per axis");
  cal->add_option("--weights", flags.weights, "Cost weights g1,g2,g3,g4")
      ->delimiter(',')
      ->expected(4);
  cal->add_option("--triple", flags.triple, "Camera triple i,j,k")->delimiter(',')->expected(3);
  cal->add_option("--seed", flags.seed, "Seed of the deterministic internals");

  CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic scene file");
  sim->add_option("--output", flags.output, "Scene JSON file (default: stdout)");
  sim->add_option("--cameras", spec.n_cameras, "Number of cameras");
  sim->add_option("--points", spec.n_points, "Number of free points");
  sim->add_option("--bars", spec.n_bar_triplets, "Number of rigid three-point bars");
  sim->add_option("--bar-length", spec.bar_length, "Bar length in scene units");
  sim->add_option("--noise", spec.noise_sigma, "Gaussian pixel noise sigma");
  sim->add_option("--seed", spec.seed, "Scene seed");
  sim->add_option("--focal", focal_range, "Focal range lo,hi in pixels")
      ->delimiter(',')
      ->expected(2);
  sim->add_option("--pp-offset", pp_offset, "Principal point |offset| range lo,hi per axis")
      ->delimiter(',')
      ->expected(2);
  sim->add_option("--size", image_size, "Image size W,H in pixels")->delimiter(',')->expected(2);

  CLI::App* surf = app.add_subcommand("cost-surface", "Export the sampled cost surface as CSV");
  surf->add_option("--input", flags.input, "Reconstruction JSON file")->required();
  surf->add_option("--output", flags.output, "CSV file (default: stdout)");
  surf->add_option("--grid", flags.grid, "Search grid N,M")->delimiter(',')->expected(2);
  surf->add_option("--weights", flags.weights, "Cost weights g1,g2,g3,g4")
      ->delimiter(',')
      ->expected(4);
  surf->add_option("--triple", flags.triple, "Camera triple i,j,k")->delimiter(',')->expected(3);
  surf->add_option("--seed", flags.seed, "Seed of the deterministic internals");

  CLI::App* eval = app.add_subcommand("evaluate", "Score results against ground truth");
  eval->add_option("--input", flags.input, "Scene JSON file with ground_truth")->required();
  eval->add_option("--result", result_paths, "Result JSON file (repeatable)")->required();
  eval->add_option("--output", flags.output, "Report JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cal) return run_calibrate(flags);
    if (*sim) {
      spec.focal_range = slcv::Vec2(focal_range[0], focal_range[1]);
      spec.pp_offset_range = slcv::Vec2(pp_offset[0], pp_offset[1]);
      spec.image_width = image_size[0];
      spec.image_height = image_size[1];
      return run_simulate(flags, spec);
    }
    if (*surf) return run_cost_surface(flags);
    if (*eval) return run_evaluate(flags, result_paths);
  } catch (const slcv::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return classify(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
