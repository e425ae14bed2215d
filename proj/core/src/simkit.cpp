#include "slcv/simkit.hpp"

#include "slcv/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace slcv {
namespace {

Vec3 random_unit(SplitMix64& rng) {
  Vec3 v;
  double n = 0.0;
  do {
    v << rng.normal(), rng.normal(), rng.normal();
    n = v.norm();
  } while (n < 1e-6);
  return v / n;
}

/// Camera matrix from intrinsics and pose.
Mat34 compose(const Mat3& k, const Mat3& r, const Vec3& c) {
  Mat34 p;
  p.leftCols<3>() = k * r;
  p.col(3) = -k * r * c;
  return p;
}

/// Rotation looking from c toward target, roll fixed by the up hint.
Mat3 look_at(const Vec3& c, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - c).normalized();
  const Vec3 x = up.cross(z).normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = z;
  return r;
}

bool projects_inside(const Mat34& p, const std::vector<Vec4>& points, double w, double h) {
  for (const Vec4& x : points) {
    const Vec3 img = p * x;
    if (!(img(2) > 0.0)) return false;  // behind the camera
    const double u = img(0) / img(2);
    const double v = img(1) / img(2);
    if (!(u >= 0.0 && u <= w && v >= 0.0 && v <= h)) return false;
  }
  return true;
}

/// Smallest normalized incidence between one camera's principal plane and
/// another's center, over both orderings.
double incidence_margin(const ProjectionMatrix& a, const ProjectionMatrix& b) {
  const Vec4c pa = unitize(principal_plane(a).v);
  const Vec4c pb = unitize(principal_plane(b).v);
  const Vec4c ca = unitize(optical_center(a).v);
  const Vec4c cb = unitize(optical_center(b).v);
  return std::min(std::abs((pa.adjoint() * cb).value()), std::abs((pb.adjoint() * ca).value()));
}

/// Linear triangulation of one point from noisy pixel observations, with
/// image-coordinate conditioning.
Vec4 triangulate(const std::vector<ProjectionMatrix>& cams, const std::vector<Vec2>& uv) {
  Eigen::MatrixXd rows(2 * static_cast<Eigen::Index>(cams.size()), 4);
  for (std::size_t k = 0; k < cams.size(); ++k) {
    const ProjectionMatrix& cam = cams[k];
    const double sw = 2.0 / (cam.width > 0 ? cam.width : 1.0);
    const double sh = 2.0 / (cam.height > 0 ? cam.height : 1.0);
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
    t(0, 0) = sw;
    t(1, 1) = sh;
    t(0, 2) = -1.0;
    t(1, 2) = -1.0;
    const Mat34 p = t * cam.p;
    const double u = sw * uv[k](0) - 1.0;
    const double v = sh * uv[k](1) - 1.0;
    rows.row(2 * k + 0) = u * p.row(2) - p.row(0);
    rows.row(2 * k + 1) = v * p.row(2) - p.row(1);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  return svd.matrixV().col(3);
}

}  // namespace

Scene make_scene(const SceneSpec& spec) {
  if (spec.n_cameras < 2) fail(Errc::InvalidInput, "a scene needs at least two cameras");
  if (spec.n_points < 0 || spec.n_bar_triplets < 0)
    fail(Errc::InvalidInput, "negative entity count");
  if (spec.n_points + spec.n_bar_triplets <= 0)
    fail(Errc::InvalidInput, "a scene needs some structure");
  if (!(spec.focal_range(0) > 0.0) || spec.focal_range(1) < spec.focal_range(0))
    fail(Errc::InvalidInput, "focal range must be positive and ordered");
  if (spec.pp_offset_range(0) < 0.0 || spec.pp_offset_range(1) < spec.pp_offset_range(0))
    fail(Errc::InvalidInput, "principal-point offset range must be nonnegative and ordered");
  if (!(spec.image_width > 0.0) || !(spec.image_height > 0.0))
    fail(Errc::InvalidInput, "image size must be positive");
  if (spec.noise_sigma < 0.0) fail(Errc::InvalidInput, "noise sigma must be nonnegative");
  if (spec.n_bar_triplets > 0 && !(spec.bar_length > 0.0))
    fail(Errc::InvalidInput, "bar length must be positive");

  const SplitMix64 root(spec.seed);
  SplitMix64 pts_rng = root.split(1);
  SplitMix64 bar_rng = root.split(2);
  SplitMix64 cam_rng = root.split(3);
  SplitMix64 noise_rng = root.split(4);
  SplitMix64 scr_rng = root.split(5);

  Scene scene;
  GroundTruth& truth = scene.truth;
  ProjectiveReconstruction& recon = scene.recon;

  // Structure: free points in a cube, then bars (end, exact midpoint, end).
  for (int i = 0; i < spec.n_points; ++i)
    truth.points.push_back(Vec4(pts_rng.uniform(-1.0, 1.0), pts_rng.uniform(-1.0, 1.0),
                                pts_rng.uniform(-1.0, 1.0), 1.0));
  for (int i = 0; i < spec.n_bar_triplets; ++i) {
    Vec3 center;
    center << bar_rng.uniform(-0.7, 0.7), bar_rng.uniform(-0.7, 0.7), bar_rng.uniform(-0.7, 0.7);
    const Vec3 dir = random_unit(bar_rng);
    const Vec3 half = 0.5 * spec.bar_length * dir;
    const int base = static_cast<int>(truth.points.size());
    truth.points.push_back((Vec4() << center - half, 1.0).finished());
    truth.points.push_back((Vec4() << center, 1.0).finished());
    truth.points.push_back((Vec4() << center + half, 1.0).finished());
    truth.triplets.push_back({base, base + 1, base + 2});
  }

  Vec3 centroid = Vec3::Zero();
  for (const Vec4& x : truth.points) centroid += x.head<3>();
  centroid /= static_cast<double>(truth.points.size());
  double cloud_radius = 0.0;
  for (const Vec4& x : truth.points)
    cloud_radius = std::max(cloud_radius, (x.head<3>() - centroid).norm());
  cloud_radius = std::max(cloud_radius, 1e-3);

  // Cameras on a jittered sphere, each looking at the centroid, each far
  // enough out that its field of view covers the whole cloud.
  std::vector<ProjectionMatrix> metric_cams;
  constexpr int kMaxTries = 120;
  for (int i = 0; i < spec.n_cameras; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxTries && !placed; ++attempt) {
      const double alpha = cam_rng.uniform(spec.focal_range(0), spec.focal_range(1));
      const double mx = cam_rng.uniform(spec.pp_offset_range(0), spec.pp_offset_range(1));
      const double my = cam_rng.uniform(spec.pp_offset_range(0), spec.pp_offset_range(1));
      const double sx = cam_rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double sy = cam_rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double u0 = 0.5 * spec.image_width + sx * mx;
      const double v0 = 0.5 * spec.image_height + sy * my;

      const double usable =
          0.85 * std::min(std::min(u0, spec.image_width - u0),
                          std::min(v0, spec.image_height - v0));
      if (!(usable > 0.0)) continue;  // principal point escaped the image
      const double half_angle = std::atan2(usable, alpha);
      double dist = 1.25 * cloud_radius / std::sin(std::min(half_angle * 0.9, 1.0));
      dist *= 1.0 + 0.15 * cam_rng.uniform();

      Mat3 k = Mat3::Identity();
      k(0, 0) = alpha;
      k(1, 1) = alpha;
      k(0, 2) = u0;
      k(1, 2) = v0;

      const Vec3 dir = random_unit(cam_rng);
      Vec3 up = random_unit(cam_rng);
      const Vec3 c = centroid + dist * dir;
      // Aim near, not at, the centroid: concurrent optical axes are a
      // degenerate configuration for some calibration approaches.
      const Vec3 target = centroid + 0.2 * cloud_radius * random_unit(cam_rng);
      const Vec3 axis = (target - c).normalized();
      while (std::abs(up.dot(axis)) > 0.9) up = random_unit(cam_rng);
      const Mat3 r = look_at(c, target, up);

      ProjectionMatrix cam{compose(k, r, c), spec.image_width, spec.image_height};
      if (!projects_inside(cam.p, truth.points, spec.image_width, spec.image_height)) continue;

      bool generic = true;
      for (const ProjectionMatrix& other : metric_cams)
        if (incidence_margin(cam, other) < 1e-3) {
          generic = false;
          break;
        }
      if (!generic) continue;

      metric_cams.push_back(cam);
      truth.cameras.push_back(MetricCamera{k, r, c});
      placed = true;
    }
    if (!placed)
      fail(Errc::SpecInfeasible,
           "camera placement failed: field of view cannot cover the cloud generically");
  }

  // Exact projections, then observation noise.
  recon.observations.reserve(static_cast<std::size_t>(spec.n_cameras) * truth.points.size());
  for (int i = 0; i < spec.n_cameras; ++i) {
    for (std::size_t j = 0; j < truth.points.size(); ++j) {
      const Vec3 img = metric_cams[i].p * truth.points[j];
      Observation ob;
      ob.camera = i;
      ob.point = static_cast<int>(j);
      ob.u = img(0) / img(2);
      ob.v = img(1) / img(2);
      recon.observations.push_back(ob);
    }
  }
  if (spec.noise_sigma > 0.0) {
    for (Observation& ob : recon.observations) {
      ob.u += spec.noise_sigma * noise_rng.normal();
      ob.v += spec.noise_sigma * noise_rng.normal();
    }
  }

  // Points of the handed-out reconstruction: exact when noiseless, otherwise
  // retriangulated from the noisy observations so the structure is consistent
  // with what an estimator would produce.
  std::vector<Vec4> recon_points_metric = truth.points;
  if (spec.noise_sigma > 0.0) {
    std::vector<Vec2> uv(metric_cams.size());
    for (std::size_t j = 0; j < truth.points.size(); ++j) {
      for (std::size_t i = 0; i < metric_cams.size(); ++i) {
        const Observation& ob = recon.observations[i * truth.points.size() + j];
        uv[i] = Vec2(ob.u, ob.v);
      }
      recon_points_metric[j] = triangulate(metric_cams, uv);
    }
  }

  // Projective scramble, redrawn until well conditioned.
  Mat4 h;
  double cond = std::numeric_limits<double>::infinity();
  do {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        h(a, b) = (a == b ? 1.0 : 0.0) + scr_rng.uniform(-0.3, 0.3);
    const Eigen::JacobiSVD<Mat4> svd(h);
    cond = svd.singularValues()(0) / svd.singularValues()(3);
  } while (!(cond < 100.0));
  const Mat4 hinv = h.inverse();

  recon.cameras.reserve(metric_cams.size());
  for (const ProjectionMatrix& cam : metric_cams)
    recon.cameras.push_back(ProjectionMatrix{cam.p * hinv, cam.width, cam.height});
  recon.points.reserve(recon_points_metric.size());
  for (const Vec4& x : recon_points_metric) recon.points.push_back(h * x);
  recon.triplets = truth.triplets;

  truth.h = h;
  truth.plane = hinv.transpose().col(3).normalized();
  return scene;
}

ScoreReport score(const UpgradeResult& result, const GroundTruth& truth,
                  const ProjectiveReconstruction* recon) {
  if (result.cameras.size() != truth.cameras.size())
    fail(Errc::Mismatch, "camera counts differ between result and truth");

  ScoreReport rep;
  const std::size_t n = truth.cameras.size();
  rep.focal_rel_err.resize(n);
  rep.pp_err_px.resize(n);
  rep.skew_rel.resize(n);
  rep.aspect_err.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Mat3& kt = truth.cameras[i].k;
    const Mat3& kr = result.cameras[i].k;
    rep.focal_rel_err[i] = std::abs(kr(0, 0) - kt(0, 0)) / kt(0, 0);
    rep.pp_err_px[i] = std::hypot(kr(0, 2) - kt(0, 2), kr(1, 2) - kt(1, 2));
    rep.skew_rel[i] = std::abs(kr(0, 1)) / std::abs(kr(0, 0));
    rep.aspect_err[i] = std::abs(kr(1, 1) / kr(0, 0) - 1.0);
    rep.max_focal_rel_err = std::max(rep.max_focal_rel_err, rep.focal_rel_err[i]);
    rep.max_pp_err_px = std::max(rep.max_pp_err_px, rep.pp_err_px[i]);
  }
  rep.plane_angular_err = angular_gap(result.plane, truth.plane.cast<cd>().eval());

  rep.sigma_mu = std::numeric_limits<double>::quiet_NaN();
  rep.reprojection_rms = std::numeric_limits<double>::quiet_NaN();
  if (recon != nullptr) {
    if (recon->triplets.size() >= 2)
      rep.sigma_mu = segment_length_stats(recon->points, recon->triplets, result.h).ratio;
    if (!recon->observations.empty() && !recon->points.empty())
      rep.reprojection_rms = reprojection_rms(*recon, result.h);
  } else if (truth.triplets.size() >= 2) {
    std::vector<Vec4> scrambled;
    scrambled.reserve(truth.points.size());
    for (const Vec4& x : truth.points) scrambled.push_back(truth.h * x);
    rep.sigma_mu = segment_length_stats(scrambled, truth.triplets, result.h).ratio;
  }
  return rep;
}

}  // namespace slcv
