#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"

#include "slcv/search.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

using namespace slcv;
using namespace testutil;

namespace {

/// Expected grid entry straight from the sampling recipe: index 0 is the
/// origin, then the closed disk row-major in (radius index j, angle index k),
/// then the complement with inverted radii and negated angles.
cd expected_grid_entry(int n, int m, std::size_t i) {
  if (i == 0) return cd(0.0, 0.0);
  const std::size_t disk = static_cast<std::size_t>(n) * m;
  if (i <= disk) {
    const int j = 1 + static_cast<int>((i - 1) / m);
    const int k = 1 + static_cast<int>((i - 1) % m);
    return std::polar(static_cast<double>(j) / n, 2.0 * std::numbers::pi * k / m);
  }
  const std::size_t r = i - 1 - disk;
  const int j = 1 + static_cast<int>(r / m);
  const int k = 1 + static_cast<int>(r % m);
  return std::polar(static_cast<double>(n) / j, -2.0 * std::numbers::pi * k / m);
}

CostContext context_of(const Scene& scene) {
  return make_cost_context(scene.recon, {}, {0, 1, 2});
}

/// Reconstruction whose cameras 1 and 2 share camera 0's optical center,
/// which leaves no admissible plane for the pencil construction.
ProjectiveReconstruction coincident_center_recon(std::uint64_t seed) {
  Scene scene = default_scene(seed);
  ProjectiveReconstruction recon = scene.recon;
  const Vec4 c0h = optical_center(recon.cameras[0]).v.real();
  const Vec3 c0 = c0h.head<3>() / c0h(3);
  SplitMix64 rng(seed ^ 0xC01DC0FFEEull);
  for (int k = 1; k <= 2; ++k) {
    const Mat3 kk = square_k(1200.0 + 200.0 * k, 640.0, 480.0);
    recon.cameras[k] = make_camera(kk, random_rotation(rng), c0);
  }
  return recon;
}

/// The same reconstruction expressed in a fresh projective frame: cameras are
/// multiplied by g, points by its inverse, so every image is unchanged.
ProjectiveReconstruction reframe(const ProjectiveReconstruction& recon, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Mat4 g;
  do {
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) g(r, c) = (r == c ? 1.0 : 0.0) + rng.uniform(-0.3, 0.3);
  } while (g.jacobiSvd().singularValues()(0) >
           100.0 * g.jacobiSvd().singularValues()(3));
  const Mat4 ginv = g.inverse();
  ProjectiveReconstruction out = recon;
  for (ProjectionMatrix& cam : out.cameras) cam.p = cam.p * g;
  for (Vec4& x : out.points) x = ginv * x;
  return out;
}

double focal_err(const UpgradeResult& result, const GroundTruth& truth) {
  double worst = 0.0;
  for (std::size_t k = 0; k < result.cameras.size(); ++k) {
    const double alpha_true = truth.cameras[k].k(0, 0);
    worst = std::max(worst,
                     std::abs(result.cameras[k].k(0, 0) - alpha_true) / alpha_true);
  }
  return worst;
}

double plane_err(const UpgradeResult& result, const GroundTruth& truth) {
  return angular_gap(result.plane, truth.plane.cast<cd>().eval());
}

}  // namespace

TEST_CASE("complex sampling grid follows the two-shell recipe") {
  SUBCASE("sizes and closed form") {
    CHECK(sample_grid(GridSpec{1, 1}).size() == 2);
    CHECK(sample_grid(GridSpec{2, 2}).size() == 7);
    CHECK(sample_grid(GridSpec{50, 50}).size() == 4951);
    for (int n : {1, 2, 3, 7}) {
      for (int m : {1, 2, 5, 8}) {
        const std::vector<cd> zs = sample_grid(GridSpec{n, m});
        CHECK(zs.size() == static_cast<std::size_t>(1 + n * m + (n - 1) * m));
      }
    }
  }

  SUBCASE("entry-by-entry layout") {
    const int n = 3;
    const int m = 4;
    const std::vector<cd> zs = sample_grid(GridSpec{n, m});
    REQUIRE(zs.size() == static_cast<std::size_t>(1 + n * m + (n - 1) * m));
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const cd want = expected_grid_entry(n, m, i);
      CHECK(std::abs(zs[i] - want) <= 1e-15);
    }
    // The first shell fills the closed unit disk, the second its complement.
    for (std::size_t i = 1; i < zs.size(); ++i) {
      if (i <= static_cast<std::size_t>(n) * m)
        CHECK(std::abs(zs[i]) <= 1.0 + 1e-12);
      else
        CHECK(std::abs(zs[i]) > 1.0 + 1e-12);
    }
  }

  SUBCASE("deterministic") {
    const std::vector<cd> a = sample_grid(GridSpec{9, 6});
    const std::vector<cd> b = sample_grid(GridSpec{9, 6});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].real() == b[i].real());
      CHECK(a[i].imag() == b[i].imag());
    }
  }

  SUBCASE("rejects non-positive resolutions") {
    CHECK_ERRC(sample_grid(GridSpec{0, 5}), Errc::InvalidInput);
    CHECK_ERRC(sample_grid(GridSpec{5, 0}), Errc::InvalidInput);
    CHECK_ERRC(sample_grid(GridSpec{-1, -1}), Errc::InvalidInput);
  }
}

TEST_CASE("thread resolution order: argument, environment, hardware") {
  CHECK(resolve_threads(7) == 7);
  CHECK(resolve_threads(1) == 1);

  setenv("SLCV_THREADS", "3", 1);
  CHECK(resolve_threads(0) == 3);
  CHECK(resolve_threads(5) == 5);  // An explicit request out-ranks the env.

  setenv("SLCV_THREADS", "99999999", 1);
  CHECK(resolve_threads(0) == 1024);

  // Unusable values fall through to the hardware count (at least one).
  for (const char* bad : {"zero", "", "0", "-2"}) {
    setenv("SLCV_THREADS", bad, 1);
    CHECK(resolve_threads(0) >= 1);
  }
  unsetenv("SLCV_THREADS");
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("grid evaluation: bookkeeping, determinism across widths, argmin") {
  const Scene scene = default_scene(102);
  const CostContext ctx = context_of(scene);

  const GridResult one = grid_search(ctx, GridSpec{30, 30}, 1);
  REQUIRE(one.zs.size() == 1771);
  REQUIRE(one.samples.size() == one.zs.size());
  REQUIRE(one.index < one.zs.size());
  CHECK(one.z0 == one.zs[one.index]);
  CHECK(one.cost == one.samples[one.index].cost);
  for (const GridSample& s : one.samples) CHECK(!(s.cost < one.cost));

  SUBCASE("identical result on eight threads") {
    const GridResult par = grid_search(ctx, GridSpec{30, 30}, 8);
    CHECK(par.index == one.index);
    CHECK(par.z0 == one.z0);
    CHECK(par.cost == one.cost);
    REQUIRE(par.samples.size() == one.samples.size());
    for (std::size_t i = 0; i < one.samples.size(); ++i) {
      CHECK(par.samples[i].cost == one.samples[i].cost);
      CHECK(par.samples[i].cost_chi1 == one.samples[i].cost_chi1);
      CHECK(par.samples[i].cost_chi2 == one.samples[i].cost_chi2);
    }
  }

  SUBCASE("noiseless scenes reach a small minimum on the default grid") {
    for (std::uint64_t seed : {102ull, 103ull}) {
      const Scene s = default_scene(seed);
      const GridResult grid = grid_search(context_of(s), GridSpec{50, 50});
      CHECK_MESSAGE(grid.cost <= 1e-3, "seed ", seed, " grid argmin cost ", grid.cost);
    }
  }

  SUBCASE("all-infeasible configurations are reported") {
    const ProjectiveReconstruction recon = coincident_center_recon(150);
    const CostContext bad = make_cost_context(recon, {}, {0, 1, 2});
    CHECK_ERRC(grid_search(bad, GridSpec{5, 5}), Errc::AllInfeasible);
  }
}

TEST_CASE("simplex refinement descends and respects its budget") {
  SUBCASE("never above the start, and the argmin start reaches the floor") {
    // Seeds whose default-grid argmin sits in the global valley.
    for (std::uint64_t seed : {105ull, 107ull, 719ull}) {
      const Scene scene = default_scene(seed);
      const CostContext ctx = context_of(scene);
      const GridResult grid = grid_search(ctx, GridSpec{50, 50});
      const SearchResult ref = refine(grid.z0, ctx);
      CHECK(ref.z0 == grid.z0);
      CHECK(ref.breakdown.c0 <= grid.cost);
      CHECK_MESSAGE(ref.breakdown.c0 <= 1e-8, "seed ", seed, " refined to ",
                    ref.breakdown.c0);
      CHECK(angular_gap(ref.chosen_plane, scene.truth.plane.cast<cd>().eval()) <= 1e-5);
      REQUIRE(!ref.cost_history.empty());
      CHECK(ref.cost_history.back() == ref.breakdown.c0);
      for (std::size_t i = 1; i < ref.cost_history.size(); ++i)
        CHECK(ref.cost_history[i] <= ref.cost_history[i - 1]);
    }
  }

  SUBCASE("zero budget returns the start unchanged") {
    const Scene scene = default_scene(102);
    const CostContext ctx = context_of(scene);
    const GridResult grid = grid_search(ctx, GridSpec{10, 10});
    const SearchResult ref = refine(grid.z0, ctx, 0);
    CHECK(ref.z1 == grid.z0);
    CHECK(ref.breakdown.c0 == grid.cost);
    CHECK(ref.cost_history.size() == 1);
    CHECK(!ref.converged);
  }

  SUBCASE("rejects negative budgets and infinite-cost starts") {
    const Scene scene = default_scene(102);
    const CostContext ctx = context_of(scene);
    CHECK_ERRC(refine(cd(0.1, 0.1), ctx, -1), Errc::InvalidInput);
    // The candidate construction degenerates when the base point q = r + z*C1
    // falls on the second camera's principal plane: that z costs +inf.
    const CameraTriple& triple = ctx.triple;
    const cd z_bad = z_for_plane(triple, triple.principal_planes[1]);
    CHECK_ERRC(refine(z_bad, ctx), Errc::InvalidInput);
  }
}

TEST_CASE("full calibration recovers the metric frame on clean scenes") {
  SUBCASE("five square-pixel cameras, varied seeds") {
    for (std::uint64_t seed : {901ull, 902ull, 903ull, 904ull, 905ull}) {
      const Scene scene = default_scene(seed);
      CalibrateConfig cfg;
      cfg.grid = GridSpec{30, 30};
      const UpgradeResult result = calibrate_slcv(scene.recon, cfg);
      CHECK(result.diagnostics.method == "slcv");
      CHECK(result.diagnostics.converged);
      CHECK(result.diagnostics.final_cost <= result.diagnostics.grid_cost);
      CHECK_MESSAGE(result.diagnostics.final_cost <= 1e-8, "seed ", seed, " final ",
                    result.diagnostics.final_cost);
      CHECK_MESSAGE(focal_err(result, scene.truth) <= 1e-3, "seed ", seed);
      CHECK(plane_err(result, scene.truth) <= 1e-5);
      for (const MetricCamera& cam : result.cameras) {
        CHECK(std::abs(cam.k(0, 1)) <= 1e-5 * cam.k(0, 0));
        CHECK(std::abs(cam.k(1, 1) / cam.k(0, 0) - 1.0) <= 1e-5);
      }
      CHECK(result.reprojection_rms <= 1e-6);
    }
  }

  SUBCASE("accuracy does not depend on where the principal points sit") {
    SceneSpec spec;
    spec.n_cameras = 10;
    spec.n_points = 30;
    spec.pp_offset_range = Vec2(150.0, 170.0);
    spec.seed = 801;
    const Scene scene = make_scene(spec);
    const UpgradeResult result = calibrate_slcv(scene.recon, {});
    CHECK(focal_err(result, scene.truth) <= 1e-3);
    CHECK(plane_err(result, scene.truth) <= 1e-5);
  }

  SUBCASE("the answer is invariant to the projective frame") {
    const Scene scene = default_scene(201);
    CalibrateConfig cfg;
    cfg.grid = GridSpec{30, 30};
    const UpgradeResult a = calibrate_slcv(scene.recon, cfg);
    const UpgradeResult b = calibrate_slcv(reframe(scene.recon, 77), cfg);
    REQUIRE(a.cameras.size() == b.cameras.size());
    for (std::size_t k = 0; k < a.cameras.size(); ++k)
      CHECK((a.cameras[k].k - b.cameras[k].k).norm() <= 1e-6 * a.cameras[k].k.norm());
  }

  SUBCASE("an explicit camera triple is honored") {
    const Scene scene = default_scene(201);
    CalibrateConfig cfg;
    cfg.grid = GridSpec{30, 30};
    cfg.triple = {2, 0, 4};
    const UpgradeResult result = calibrate_slcv(scene.recon, cfg);
    CHECK(result.diagnostics.triple == std::array<int, 3>{2, 0, 4});
    CHECK(focal_err(result, scene.truth) <= 1e-3);
  }

  SUBCASE("camera-count edge cases") {
    const Scene scene = default_scene(301, /*n_cameras=*/4);
    const UpgradeResult result = calibrate_slcv(scene.recon, {});
    REQUIRE(!result.diagnostics.warnings.empty());
    CHECK(result.diagnostics.warnings.front().find("four cameras") != std::string::npos);

    const Scene three = default_scene(302, /*n_cameras=*/3);
    CHECK_ERRC(calibrate_slcv(three.recon, {}), Errc::UnderConstrained);
    CHECK_ERRC(calibrate_slcv(ProjectiveReconstruction{}, {}), Errc::UnderConstrained);
  }
}

TEST_CASE("cyclic transfer cost vanishes exactly on the true plane") {
  const Scene scene = default_scene(601);
  std::array<PluckerLine, 5> lines;
  for (int k = 0; k < 5; ++k)
    lines[k] = isotropic_lines(scene.recon.cameras[k]).first;

  SUBCASE("true plane scores tiny, random planes score large") {
    const Vec4c truth = scene.truth.plane.cast<cd>();
    CHECK(cyclic_transfer_cost(truth, scene.recon, lines) <= 1e-8);

    SplitMix64 rng(601);
    for (int t = 0; t < 5; ++t) {
      const double c = cyclic_transfer_cost(random_real_plane(rng), scene.recon, lines);
      CHECK(c > 1e-3);
      CHECK(std::isfinite(c));
    }
  }

  SUBCASE("degenerate planes are rejected with precise codes") {
    // A plane containing the first selected line: spanned by two of the
    // line's points (the camera center and the meet with the far plane) and
    // one spare point.
    const Vec4c c0 = optical_center(scene.recon.cameras[0]).v;
    const std::optional<HPoint> at_inf =
        line_plane_meet(lines[0], Plane{Vec4c(0, 0, 0, 1)});
    REQUIRE(at_inf.has_value());
    SplitMix64 rng(602);
    const Vec4c containing = plane_through({c0, at_inf->v, random_vec4c(rng)});
    CHECK_ERRC(cyclic_transfer_cost(containing, scene.recon, lines), Errc::ContainedLine);

    // A plane through another camera's center maps one cyclic point onto that
    // center, which has no image.
    const Vec4c c1 = optical_center(scene.recon.cameras[1]).v;
    const Vec4c through_c1 = plane_through(
        {c1, Vec4c(cd(0.4, 0), cd(-1.0, 0), cd(0.7, 0), cd(1, 0)),
         Vec4c(cd(-0.2, 0), cd(0.9, 0), cd(1.4, 0), cd(1, 0))});
    CHECK_ERRC(cyclic_transfer_cost(through_c1, scene.recon, lines),
               Errc::NearCenterPlane);

    CHECK_ERRC(cyclic_transfer_cost(Vec4c(0, 0, 0, 1), ProjectiveReconstruction{}, lines),
               Errc::InvalidInput);
  }
}

TEST_CASE("direct plane search brackets and recovers the hidden plane") {
  SUBCASE("single step evaluates exactly the box center") {
    const Scene scene = default_scene(401);
    PlaneBox box;
    box.lo = Vec3(-0.4, -0.6, -0.8);
    box.hi = Vec3(0.8, 0.2, 0.4);
    const Vec4 pi = plane_grid_search_3d(scene.recon, box, 1, /*do_refine=*/false);
    for (int a = 0; a < 3; ++a)
      CHECK(pi(a) == box.lo(a) + 0.5 * (box.hi(a) - box.lo(a)));
    CHECK(pi(3) == 1.0);
  }

  SUBCASE("coarse argmin lands within one cell of the truth") {
    for (std::uint64_t seed : {401ull, 403ull, 404ull}) {
      const Scene scene = default_scene(seed);
      const Vec4 pi = plane_grid_search_3d(scene.recon, PlaneBox{}, 20, /*do_refine=*/false);
      const Vec4 truth = scene.truth.plane / scene.truth.plane(3);
      const double cell = 2.0 / 20;
      CHECK_MESSAGE((pi.head<3>() - truth.head<3>()).lpNorm<Eigen::Infinity>() <= cell,
                    "seed ", seed);
      // ... and on a cell center of the default box.
      for (int a = 0; a < 3; ++a) {
        const double steps_in = (pi(a) + 1.0) / cell - 0.5;
        CHECK(std::abs(steps_in - std::round(steps_in)) <= 1e-9);
      }
    }
  }

  SUBCASE("a box that excludes the truth still returns its best cell") {
    const Scene scene = default_scene(403);
    PlaneBox box;
    box.lo = Vec3(0.5, 0.5, 0.5);
    box.hi = Vec3(1.0, 1.0, 1.0);
    const Vec4 pi = plane_grid_search_3d(scene.recon, box, 6, /*do_refine=*/false);
    for (int a = 0; a < 3; ++a) {
      CHECK(pi(a) >= box.lo(a));
      CHECK(pi(a) <= box.hi(a));
    }
  }

  SUBCASE("refinement reaches the plane to angular precision") {
    // Seed whose coarse landscape is the least favorable of those probed.
    const Scene scene = default_scene(402);
    const Vec4 pi = plane_grid_search_3d(scene.recon, PlaneBox{}, 40, /*do_refine=*/true);
    CHECK(angular_gap(pi.cast<cd>().eval(), scene.truth.plane.cast<cd>().eval()) <= 1e-5);
  }

  SUBCASE("invalid requests are rejected") {
    const Scene scene = default_scene(401);
    CHECK_ERRC(plane_grid_search_3d(scene.recon, PlaneBox{}, 0), Errc::InvalidInput);
    PlaneBox inverted;
    inverted.lo = Vec3(1, 0, 0);
    inverted.hi = Vec3(-1, 1, 1);
    CHECK_ERRC(plane_grid_search_3d(scene.recon, inverted, 4), Errc::InvalidInput);
    const Scene four = default_scene(401, /*n_cameras=*/4);
    CHECK_ERRC(plane_grid_search_3d(four.recon, PlaneBox{}, 4), Errc::InvalidInput);
  }

  SUBCASE("the full pipeline built on the 3D search calibrates") {
    const Scene scene = default_scene(403);
    const UpgradeResult result = calibrate_grid3d(scene.recon, PlaneBox{}, 20);
    CHECK(result.diagnostics.method == "grid3d");
    CHECK(focal_err(result, scene.truth) <= 1e-3);
    CHECK(plane_err(result, scene.truth) <= 1e-5);
  }
}

TEST_CASE("dual-quadric baseline: exact when its assumption holds, biased otherwise") {
  SUBCASE("centered principal points") {
    const Scene scene = default_scene(501, /*n_cameras=*/6);
    const UpgradeResult result = calibrate_daq(scene.recon);
    CHECK(result.diagnostics.method == "daq");
    CHECK(focal_err(result, scene.truth) <= 1e-3);
    CHECK(plane_err(result, scene.truth) <= 1e-5);
  }

  SUBCASE("decentered principal points break the assumption") {
    SceneSpec spec;
    spec.n_cameras = 6;
    spec.n_points = 30;
    spec.pp_offset_range = Vec2(150.0, 170.0);
    spec.seed = 501;
    const Scene scene = make_scene(spec);

    const UpgradeResult biased = calibrate_daq(scene.recon);
    CHECK_MESSAGE(focal_err(biased, scene.truth) >= 1e-2,
                  "assumed-center bias measured ", focal_err(biased, scene.truth));

    // Feeding the true principal points restores the accuracy.
    std::vector<Vec2> pp;
    for (const MetricCamera& cam : scene.truth.cameras)
      pp.emplace_back(cam.k(0, 2), cam.k(1, 2));
    const UpgradeResult informed = calibrate_daq(scene.recon, pp);
    CHECK(focal_err(informed, scene.truth) <= 1e-3);
    CHECK(plane_err(informed, scene.truth) <= 1e-5);
  }

  SUBCASE("rejections") {
    const Scene scene = default_scene(502, /*n_cameras=*/6);
    CHECK_ERRC(calibrate_daq(scene.recon, std::vector<Vec2>(3, Vec2::Zero())),
               Errc::Mismatch);
    const Scene two = default_scene(503, /*n_cameras=*/2);
    CHECK_ERRC(calibrate_daq(two.recon), Errc::DegenerateSolution);
    CHECK_ERRC(calibrate_daq(ProjectiveReconstruction{}), Errc::InvalidInput);
  }
}

TEST_CASE("square-pixel residual of a dual conic") {
  SUBCASE("exact zero for a square-pixel camera, by hand") {
    const Mat3 k = square_k(2.0, 3.0, 4.0);
    const Conic omega_star{(k * k.transpose()).cast<cd>().eval()};
    const auto [r1, r2] = diac_square_pixel_residual(omega_star);
    CHECK(r1 == 0.0);
    CHECK(r2 == 0.0);
  }

  SUBCASE("unequal focal lengths show up in the second residual only") {
    Mat3c m = Mat3c::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = 2.0;
    m(2, 2) = 1.0;
    const auto [r1, r2] = diac_square_pixel_residual(Conic{m});
    CHECK(r1 == 0.0);
    CHECK(r2 == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }

  SUBCASE("random square-pixel dual conics score numerically zero") {
    SplitMix64 rng(511);
    for (int t = 0; t < 10; ++t) {
      const Mat3 k = square_k(rng.uniform(900.0, 1800.0), rng.uniform(-80.0, 80.0),
                              rng.uniform(-80.0, 80.0));
      const auto [r1, r2] = diac_square_pixel_residual(Conic{(k * k.transpose()).cast<cd>().eval()});
      CHECK(std::abs(r1) <= 1e-10);
      CHECK(std::abs(r2) <= 1e-10);
    }
  }

  SUBCASE("the zero conic is rejected") {
    CHECK_ERRC(diac_square_pixel_residual(Conic{Mat3c::Zero()}), Errc::ZeroMatrix);
  }
}
