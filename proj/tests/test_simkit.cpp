#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <slcv/simkit.hpp>
#include <slcv/upgrade.hpp>
#include <slcv/variety.hpp>

#include "helpers.hpp"

#include <cmath>
#include <vector>

using namespace slcv;
using namespace testutil;
using doctest::Approx;

namespace {

Mat34 metric_projection(const MetricCamera& cam) { return compose_p(cam.k, cam.r, cam.c); }

/// Exact-recovery result: true plane plus the first camera's true conic.
UpgradeResult perfect_result(const Scene& scene) {
  UpgradeResult r;
  const Mat3 w = (scene.truth.cameras[0].k * scene.truth.cameras[0].k.transpose()).inverse();
  r.plane = scene.truth.plane.cast<cd>();
  r.iac1 = IAC{Conic{w.cast<cd>()}, false};
  r.h = homography_from_plane_iac(r.plane, r.iac1, scene.recon.cameras[0]);
  for (const ProjectionMatrix& cam : scene.recon.cameras)
    r.cameras.push_back(
        decompose_camera(ProjectionMatrix{cam.p * r.h.inverse(), cam.width, cam.height}));
  r.reprojection_rms = reprojection_rms(scene.recon, r.h);
  return r;
}

}  // namespace

TEST_CASE("scene generation is bit-identical per seed") {
  SceneSpec spec;
  spec.n_cameras = 4;
  spec.n_points = 12;
  spec.n_bar_triplets = 3;
  spec.noise_sigma = 0.7;
  spec.seed = 0xABCDEF;
  const Scene a = make_scene(spec);
  const Scene b = make_scene(spec);

  REQUIRE(a.recon.cameras.size() == b.recon.cameras.size());
  REQUIRE(a.recon.points.size() == b.recon.points.size());
  REQUIRE(a.recon.observations.size() == b.recon.observations.size());
  for (std::size_t i = 0; i < a.recon.cameras.size(); ++i) {
    CHECK((a.recon.cameras[i].p - b.recon.cameras[i].p).norm() == 0.0);
    CHECK((metric_projection(a.truth.cameras[i]) - metric_projection(b.truth.cameras[i]))
              .norm() == 0.0);
  }
  for (std::size_t j = 0; j < a.recon.points.size(); ++j) {
    CHECK((a.recon.points[j] - b.recon.points[j]).norm() == 0.0);
    CHECK((a.truth.points[j] - b.truth.points[j]).norm() == 0.0);
  }
  for (std::size_t n = 0; n < a.recon.observations.size(); ++n) {
    CHECK(a.recon.observations[n].u == b.recon.observations[n].u);
    CHECK(a.recon.observations[n].v == b.recon.observations[n].v);
  }
  CHECK((a.truth.h - b.truth.h).norm() == 0.0);
  CHECK((a.truth.plane - b.truth.plane).norm() == 0.0);
  CHECK(a.truth.triplets == b.truth.triplets);

  SUBCASE("a different seed moves the scene") {
    SceneSpec other = spec;
    other.seed = spec.seed + 1;
    const Scene c = make_scene(other);
    CHECK((a.truth.h - c.truth.h).norm() > 0.0);
    CHECK((a.recon.points[0] - c.recon.points[0]).norm() > 0.0);
  }
}

TEST_CASE("generated structure honors the scene recipe") {
  SceneSpec spec;
  spec.n_cameras = 5;
  spec.n_points = 20;
  spec.n_bar_triplets = 6;
  spec.bar_length = 0.8;
  spec.seed = 5;
  const Scene scene = make_scene(spec);

  SUBCASE("entity counts") {
    CHECK(scene.truth.points.size() == 20 + 3 * 6);
    CHECK(scene.recon.points.size() == scene.truth.points.size());
    CHECK(scene.recon.observations.size() == 5 * scene.truth.points.size());
  }

  SUBCASE("bars are exact midpoint triplets of the requested length") {
    REQUIRE(scene.truth.triplets.size() == 6);
    for (const auto& t : scene.truth.triplets) {
      const Vec3 p0 = scene.truth.points[t[0]].head<3>();
      const Vec3 p1 = scene.truth.points[t[1]].head<3>();
      const Vec3 p2 = scene.truth.points[t[2]].head<3>();
      CHECK((0.5 * (p0 + p2) - p1).norm() <= 1e-12);
      CHECK((p2 - p0).norm() == Approx(spec.bar_length).epsilon(1e-12));
      // Collinear and equidistant.
      CHECK((p1 - p0).cross(p2 - p1).norm() <= 1e-12);
      CHECK((p1 - p0).norm() == Approx((p2 - p1).norm()).epsilon(1e-12));
    }
    CHECK(scene.recon.triplets == scene.truth.triplets);
  }

  SUBCASE("all points project inside every image, in front of the camera") {
    for (const MetricCamera& cam : scene.truth.cameras) {
      const Mat34 p = metric_projection(cam);
      for (const Vec4& x : scene.truth.points) {
        const Vec3 img = p * x;
        REQUIRE(img(2) > 0.0);
        const double u = img(0) / img(2);
        const double v = img(1) / img(2);
        CHECK(u >= 0.0);
        CHECK(u <= spec.image_width);
        CHECK(v >= 0.0);
        CHECK(v <= spec.image_height);
      }
    }
  }

  SUBCASE("intrinsics are drawn from the requested ranges, square-pixel") {
    for (const MetricCamera& cam : scene.truth.cameras) {
      CHECK(cam.k(0, 0) >= spec.focal_range(0));
      CHECK(cam.k(0, 0) <= spec.focal_range(1));
      CHECK(cam.k(1, 1) == cam.k(0, 0));
      CHECK(cam.k(0, 1) == 0.0);
      CHECK(cam.k(0, 2) == 0.5 * spec.image_width);   // default: centered pp
      CHECK(cam.k(1, 2) == 0.5 * spec.image_height);
      CHECK((cam.r.transpose() * cam.r - Mat3::Identity()).norm() <= 1e-12);
      CHECK(cam.r.determinant() == Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("principal-point offsets respect the requested band") {
    SceneSpec off = spec;
    off.pp_offset_range = Vec2(120.0, 180.0);
    off.n_bar_triplets = 0;
    const Scene decentered = make_scene(off);
    for (const MetricCamera& cam : decentered.truth.cameras) {
      const double dx = std::abs(cam.k(0, 2) - 0.5 * off.image_width);
      const double dy = std::abs(cam.k(1, 2) - 0.5 * off.image_height);
      CHECK(dx >= 120.0);
      CHECK(dx <= 180.0);
      CHECK(dy >= 120.0);
      CHECK(dy <= 180.0);
    }
  }
}

TEST_CASE("the scramble is consistent and generic") {
  const Scene scene = default_scene(41);

  SUBCASE("noiseless observations reproject exactly in the scrambled frame") {
    CHECK(reprojection_rms(scene.recon) <= 1e-9);
  }

  SUBCASE("the published plane is the image of the plane at infinity") {
    // Direction vectors are points on the true plane at infinity; their images
    // under the scramble must lie on the published plane.
    SplitMix64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec4 dir = (Vec4() << random_vec3(rng), 0.0).finished();
      const Vec4 mapped = scene.truth.h * dir;
      CHECK(std::abs(scene.truth.plane.dot(mapped)) <= 1e-12 * mapped.norm());
    }
    CHECK(scene.truth.plane.norm() == Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("the six-line variety vanishes at the published plane") {
    const CameraTriple t = triple_of(scene);
    SplitMix64 prng(17);
    const Vec4c truth = scene.truth.plane.cast<cd>();
    // Relative scale: the polynomial one small step away from the root.
    double ref = 0.0;
    for (int s = 0; s < 8; ++s) {
      const Vec4c nearby = unitize(Vec4c(truth + 1e-2 * random_vec4c(prng)));
      ref = std::max(ref, std::abs(eval_g(nearby, t)));
    }
    CHECK(std::abs(eval_g(truth, t)) <= 1e-8 * ref);
  }

  SUBCASE("the scramble is well conditioned") {
    const Eigen::JacobiSVD<Mat4> svd(scene.truth.h);
    CHECK(svd.singularValues()(0) / svd.singularValues()(3) < 100.0);
  }

  SUBCASE("no camera center lies on another camera's principal plane") {
    const auto& cams = scene.recon.cameras;
    for (std::size_t i = 0; i < cams.size(); ++i)
      for (std::size_t j = 0; j < cams.size(); ++j) {
        if (i == j) continue;
        const Vec4c pi = unitize(principal_plane(cams[i]).v);
        const Vec4c cj = unitize(optical_center(cams[j]).v);
        CHECK(std::abs((pi.adjoint() * cj).value()) > 1e-6);
      }
  }
}

TEST_CASE("observation noise has the requested scale") {
  SceneSpec spec;
  spec.n_cameras = 8;
  spec.n_points = 1250;
  spec.noise_sigma = 0.5;
  spec.seed = 77;
  const Scene noisy = make_scene(spec);

  SceneSpec clean_spec = spec;
  clean_spec.noise_sigma = 0.0;
  const Scene clean = make_scene(clean_spec);

  REQUIRE(noisy.recon.observations.size() == clean.recon.observations.size());
  double acc = 0.0;
  double max_dev = 0.0;
  const std::size_t n = noisy.recon.observations.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double du = noisy.recon.observations[i].u - clean.recon.observations[i].u;
    const double dv = noisy.recon.observations[i].v - clean.recon.observations[i].v;
    acc += du * du + dv * dv;
    max_dev = std::max(max_dev, std::max(std::abs(du), std::abs(dv)));
  }
  const double sample_sigma = std::sqrt(acc / (2.0 * static_cast<double>(n)));
  CHECK(sample_sigma == Approx(spec.noise_sigma).epsilon(0.05));
  CHECK(max_dev <= 6.0 * spec.noise_sigma);
  CHECK(max_dev > 0.0);

  // The same seed draws the same cameras whether or not noise is added.
  for (std::size_t i = 0; i < noisy.truth.cameras.size(); ++i)
    CHECK((metric_projection(noisy.truth.cameras[i]) -
           metric_projection(clean.truth.cameras[i]))
              .norm() == 0.0);
}

TEST_CASE("scoring compares a result against the generating truth") {
  SceneSpec spec;
  spec.n_cameras = 5;
  spec.n_points = 30;
  spec.n_bar_triplets = 8;
  spec.seed = 61;
  const Scene scene = make_scene(spec);

  SUBCASE("perfect recovery scores clean across the board") {
    const UpgradeResult r = perfect_result(scene);
    const ScoreReport rep = score(r, scene.truth, &scene.recon);
    CHECK(rep.max_focal_rel_err <= 1e-6);
    CHECK(rep.max_pp_err_px <= 1e-6 * 1280.0);
    for (double s : rep.skew_rel) CHECK(s <= 1e-6);
    for (double a : rep.aspect_err) CHECK(a <= 1e-6);
    CHECK(rep.plane_angular_err <= 1e-6);
    CHECK(rep.sigma_mu <= 1e-9);
    CHECK(rep.reprojection_rms <= 1e-9);
  }

  SUBCASE("scoring without the reconstruction falls back to exact truth bars") {
    const UpgradeResult r = perfect_result(scene);
    const ScoreReport rep = score(r, scene.truth);
    CHECK(rep.sigma_mu <= 1e-9);
    CHECK(std::isnan(rep.reprojection_rms));
  }

  SUBCASE("skipping the upgrade leaves large recorded errors") {
    UpgradeResult identity;
    identity.h = Mat4::Identity();
    identity.plane = Vec4c(0.0, 0.0, 0.0, 1.0);
    for (const ProjectionMatrix& cam : scene.recon.cameras)
      identity.cameras.push_back(decompose_camera(cam));
    const ScoreReport rep = score(identity, scene.truth, &scene.recon);
    CHECK(rep.max_focal_rel_err > 1e-2);
    CHECK(rep.plane_angular_err > 1e-2);
    CHECK(rep.sigma_mu > 1e-2);
    MESSAGE("projective no-op score: focal ", rep.max_focal_rel_err, ", plane ",
            rep.plane_angular_err, ", sigma/mu ", rep.sigma_mu);
  }

  SUBCASE("camera count mismatch is an error") {
    UpgradeResult r = perfect_result(scene);
    r.cameras.pop_back();
    CHECK_ERRC(score(r, scene.truth, &scene.recon), Errc::Mismatch);
  }
}

TEST_CASE("impossible specs are rejected") {
  SUBCASE("field of view can never cover the cloud") {
    SceneSpec spec;
    spec.n_cameras = 3;
    spec.n_points = 10;
    spec.image_width = 100.0;
    spec.image_height = 100.0;
    spec.pp_offset_range = Vec2(400.0, 400.0);  // principal point far outside
    spec.seed = 1;
    CHECK_ERRC(make_scene(spec), Errc::SpecInfeasible);
  }

  SUBCASE("invalid parameter combinations") {
    const auto reject = [](auto&& mutate) {
      SceneSpec spec;
      spec.n_points = 10;
      mutate(spec);
      CHECK_ERRC(make_scene(spec), Errc::InvalidInput);
    };
    reject([](SceneSpec& s) { s.n_cameras = 1; });
    reject([](SceneSpec& s) { s.n_points = -3; });
    reject([](SceneSpec& s) {
      s.n_points = 0;
      s.n_bar_triplets = 0;
    });
    reject([](SceneSpec& s) { s.focal_range = Vec2(0.0, 1000.0); });
    reject([](SceneSpec& s) { s.focal_range = Vec2(1800.0, 900.0); });
    reject([](SceneSpec& s) { s.pp_offset_range = Vec2(-5.0, 10.0); });
    reject([](SceneSpec& s) { s.pp_offset_range = Vec2(10.0, 5.0); });
    reject([](SceneSpec& s) { s.image_width = 0.0; });
    reject([](SceneSpec& s) { s.image_height = -1.0; });
    reject([](SceneSpec& s) { s.noise_sigma = -0.1; });
    reject([](SceneSpec& s) {
      s.n_bar_triplets = 2;
      s.bar_length = 0.0;
    });
  }
}
