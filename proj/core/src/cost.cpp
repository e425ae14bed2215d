#include "slcv/cost.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace slcv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper-triangular entries of a symmetric 3x3 as a 6-vector.
Eigen::Matrix<double, 6, 1> upper_vec(const Eigen::Matrix3d& a) {
  Eigen::Matrix<double, 6, 1> u;
  u << a(0, 0), a(0, 1), a(0, 2), a(1, 1), a(1, 2), a(2, 2);
  return u;
}

}  // namespace

CostContext make_cost_context(const ProjectiveReconstruction& recon, const CostWeights& weights,
                              const std::array<int, 3>& triple_indices, std::uint64_t seed) {
  const int n = static_cast<int>(recon.cameras.size());
  if (n < 3) fail(Errc::InvalidInput, "a cost context needs at least three cameras");
  for (int idx : triple_indices) {
    if (idx < 0 || idx >= n) fail(Errc::InvalidInput, "triple index out of range");
  }
  if (triple_indices[0] == triple_indices[1] || triple_indices[0] == triple_indices[2] ||
      triple_indices[1] == triple_indices[2])
    fail(Errc::InvalidInput, "triple indices must be distinct");
  if (weights.gamma1 < 0 || weights.gamma2 < 0 || weights.gamma3 < 0 || weights.gamma4 < 0)
    fail(Errc::InvalidInput, "cost weights must be nonnegative");

  CostContext ctx{make_camera_triple(recon.cameras[triple_indices[0]],
                                     recon.cameras[triple_indices[1]],
                                     recon.cameras[triple_indices[2]], seed),
                  recon.cameras, weights, triple_indices};
  return ctx;
}

IAC iac_from_plane(const Vec4c& chi, int camera_index, const CameraTriple& triple,
                   const std::vector<ProjectionMatrix>& cameras) {
  if (camera_index < 0 || camera_index >= static_cast<int>(cameras.size()))
    fail(Errc::InvalidInput, "camera index out of range");
  const ProjectionMatrix& cam = cameras[camera_index];

  // Data-independent pixel normalization keeps the fit well conditioned and
  // the result a smooth function of the plane.
  const double w = cam.width > 0 ? cam.width : 1.0;
  const double h = cam.height > 0 ? cam.height : 1.0;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = 2.0 / w;
  t(1, 1) = 2.0 / h;
  t(0, 2) = -1.0;
  t(1, 2) = -1.0;
  const Mat3c tc = t.cast<cd>();
  const Eigen::Matrix<cd, 3, 4> pc = cam.p.cast<cd>();

  std::vector<Vec3c> pts;
  pts.reserve(6);
  for (int j = 0; j < 6; ++j) {
    const auto meet = line_plane_meet(PluckerLine{triple.iso_lines[j]}, Plane{chi});
    if (!meet) fail(Errc::ContainedLine, "plane contains an isotropic line");
    const Vec3c img = pc * meet->v;
    // A meet at this camera's optical center has no image; such planes are
    // rejected rather than fitted through numerical noise.
    if (img.norm() <= 1e-10 * pc.norm() * meet->v.norm())
      fail(Errc::NearCenterPlane, "plane meets an isotropic line at the camera center");
    pts.push_back(tc * img);
  }

  const Conic fitted = conic_fit(pts);
  const Mat3c back = tc.transpose() * fitted.c * tc;
  return IAC{Conic{unitize(back)}, false};
}

IAC normalize_iac(const Conic& omega) {
  const Mat3c w = unitize(omega.c);
  const Eigen::Matrix3d u = w.real();
  const Eigen::Matrix3d v = w.imag();
  const double a = u.squaredNorm();
  const double b = (u.array() * v.array()).sum();
  const double c = v.squaredNorm();

  // Maximize [cos, sin] [[a,-b],[-b,c]] [cos, sin]^T over the unit circle.
  const double theta = 0.5 * std::atan2(-2.0 * b, a - c);
  auto objective = [&](double t) {
    const double ct = std::cos(t), st = std::sin(t);
    return ct * ct * a - 2.0 * ct * st * b + st * st * c;
  };
  const double phi = objective(theta) >= objective(theta + std::numbers::pi / 2)
                         ? theta
                         : theta + std::numbers::pi / 2;
  const cd s(std::cos(phi), std::sin(phi));

  Mat3c out = s * w;
  if (out.real().trace() < 0.0) out = -out;
  return IAC{Conic{unitize(out)}, true};
}

double c1(const IAC& omega) {
  const Eigen::Matrix<double, 6, 1> u = upper_vec(omega.omega.c.real());
  const Eigen::Matrix<double, 6, 1> v = upper_vec(omega.omega.c.imag());
  const double nu = u.squaredNorm();
  const double nv = v.squaredNorm();
  const double denom = nu + nv;
  if (denom == 0.0) return 0.0;
  const double uv = u.dot(v);
  const double gram = std::max(0.0, nu * nv - uv * uv);
  return std::sqrt(2.0 * gram) / denom;
}

double c2(const IAC& omega) {
  const auto g = [](const Eigen::Matrix3d& a) {
    const double d1 = a(0, 0);
    const double d2 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double d3 = a.determinant();
    return -(std::min(0.0, d1) + std::min(0.0, d2) + std::min(0.0, d3));
  };
  const Eigen::Matrix3d a = omega.omega.c.real();
  return std::min(g(a), g(Eigen::Matrix3d(-a)));
}

double c3(const IAC& omega) {
  const Eigen::Matrix3d a = omega.omega.c.real();
  if (std::abs(a(0, 0)) < tol::entry_floor || std::abs(a(1, 1)) < tol::entry_floor)
    fail(Errc::IllConditioned, "diagonal conic entries too small for the pixel-shape terms");
  const double tau2 = a(0, 0) / a(1, 1);
  const double cos2 = a(0, 1) * a(0, 1) / std::abs(a(0, 0) * a(1, 1));
  return std::abs(tau2 - 1.0) + cos2;
}

double c4(const IAC& omega, double image_width, double image_height) {
  const Eigen::Matrix3d adj = adjugate3(omega.omega.c.real());
  const double scale = adj.norm();
  if (scale == 0.0 || std::abs(adj(2, 2)) <= tol::entry_floor * scale)
    fail(Errc::DegenerateAdjoint, "dual conic has no finite principal point");
  const double u0 = adj(0, 2) / adj(2, 2);
  const double v0 = adj(1, 2) / adj(2, 2);
  double d = 0.0;
  d += std::max(0.0, -u0) + std::max(0.0, u0 - image_width);
  d += std::max(0.0, -v0) + std::max(0.0, v0 - image_height);
  return d;
}

CostBreakdown c0(const Vec4c& chi, const CostContext& context) {
  CostBreakdown out;
  out.plane = chi;
  out.cameras.resize(context.cameras.size());
  double worst = -kInf;
  for (std::size_t i = 0; i < context.cameras.size(); ++i) {
    CameraCost& cc = out.cameras[i];
    try {
      const IAC raw = iac_from_plane(chi, static_cast<int>(i), context.triple, context.cameras);
      const IAC w = normalize_iac(raw.omega);
      cc.c1 = c1(w);
      cc.c2 = c2(w);
      cc.c3 = c3(w);
      cc.c4 = c4(w, context.cameras[i].width, context.cameras[i].height);
      cc.weighted = context.weights.gamma1 * cc.c1 + context.weights.gamma2 * cc.c2 +
                    context.weights.gamma3 * cc.c3 + context.weights.gamma4 * cc.c4;
    } catch (const Error&) {
      cc.c1 = cc.c2 = cc.c3 = cc.c4 = std::numeric_limits<double>::quiet_NaN();
      cc.weighted = kInf;
    }
    worst = std::max(worst, cc.weighted);
  }
  out.c0 = context.cameras.empty() ? 0.0 : worst;
  return out;
}

ZCost cost_z(cd z, const CostContext& context) {
  ZCost out;
  std::optional<CandidatePlanePair> pair;
  try {
    pair = candidate_planes(context.triple, z);
  } catch (const Error&) {
    out.cost = out.cost_chi1 = out.cost_chi2 = kInf;
    return out;
  }
  out.pair = pair;
  CostBreakdown b1 = c0(pair->chi1, context);
  CostBreakdown b2 = c0(pair->chi2, context);
  out.cost_chi1 = b1.c0;
  out.cost_chi2 = b2.c0;
  if (b1.c0 <= b2.c0) {
    out.cost = b1.c0;
    out.best = std::move(b1);
  } else {
    out.cost = b2.c0;
    out.best = std::move(b2);
  }
  return out;
}

}  // namespace slcv
