#include "slcv/upgrade.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace slcv {

namespace {

// Phase-normalizes a homogeneous complex vector and extracts its real
// representative; throws when the imaginary residue is too large.
Vec4 realize_plane(const Vec4c& pi) {
  int k = 0;
  pi.cwiseAbs().maxCoeff(&k);
  const cd pivot = pi(k);
  if (std::abs(pivot) == 0.0) fail(Errc::ZeroMatrix, "zero plane vector");
  const Vec4c rotated = pi * (std::conj(pivot) / std::abs(pivot));
  const double re = rotated.real().norm();
  const double im = rotated.imag().norm();
  if (im > 1e-6 * re) fail(Errc::ComplexPlane, "plane has a non-negligible imaginary part");
  Vec4 p = rotated.real();
  p.normalize();
  return p;
}

// Real part of a normalized conic with the sign fixed so it is positive
// definite; throws when indefinite.
Eigen::Matrix3d definite_real_part(const IAC& omega) {
  const IAC n = omega.normalized ? omega : normalize_iac(omega.omega);
  Eigen::Matrix3d u = n.omega.c.real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(u);
  const Vec3 ev = eig.eigenvalues();
  if (ev(0) > 0.0) return u;
  if (ev(2) < 0.0) return -u;
  fail(Errc::NonDefiniteIAC, "real part of the conic is indefinite");
}

}  // namespace

Mat4 homography_from_plane_iac(const Vec4c& pi, const IAC& omega1, const ProjectionMatrix& p1) {
  const Vec4 p = realize_plane(pi);
  if (std::abs(p(3)) <= 1e-12)
    fail(Errc::DegenerateConfiguration, "plane passes through the frame's base point (0,0,0,1)");
  const Vec3 ptilde = p.head<3>() / p(3);

  const Eigen::Matrix3d u = definite_real_part(omega1);

  const Eigen::Matrix3d a1 = p1.p.leftCols<3>();
  const Vec3 b1 = p1.p.col(3);
  const Eigen::Matrix3d m1 = a1 - b1 * ptilde.transpose();

  const Eigen::Matrix3d s = m1.transpose() * u * m1;
  Eigen::LLT<Eigen::Matrix3d> llt(s);
  if (llt.info() != Eigen::Success)
    fail(Errc::NearCenterPlane, "plane passes through the first camera's center");
  // Unit-determinant gauge: the contract fixes the block only up to scale.
  Eigen::Matrix3d b = llt.matrixU();
  b /= std::cbrt(b.determinant());

  Mat4 h = Mat4::Zero();
  h.topLeftCorner<3, 3>() = b;
  h.row(3).head<3>() = ptilde.transpose();
  h(3, 3) = 1.0;
  return h;
}

MetricCamera decompose_camera(const ProjectionMatrix& pm) {
  Mat34 p = pm.p;
  Eigen::Matrix3d m = p.leftCols<3>();
  const double scale = m.norm();
  if (scale == 0.0 || std::abs(m.determinant()) <= 1e-12 * scale * scale * scale)
    fail(Errc::DegenerateCamera, "camera is not finite");
  if (m.determinant() < 0.0) {
    p = -p;
    m = -m;
  }

  // RQ by three Givens rotations applied on the right: zero (2,1), (2,0), (1,0).
  Eigen::Matrix3d k = m;
  Eigen::Matrix3d q = Eigen::Matrix3d::Identity();
  const auto apply = [&](const Eigen::Matrix3d& g) {
    k = k * g;
    q = q * g;
  };
  {
    const double rr = std::hypot(k(2, 2), k(2, 1));
    if (rr > 0.0) {
      const double c = k(2, 2) / rr, s = -k(2, 1) / rr;
      Eigen::Matrix3d g;
      g << 1, 0, 0, 0, c, -s, 0, s, c;
      apply(g);
    }
  }
  {
    const double rr = std::hypot(k(2, 2), k(2, 0));
    if (rr > 0.0) {
      const double c = k(2, 2) / rr, s = k(2, 0) / rr;
      Eigen::Matrix3d g;
      g << c, 0, s, 0, 1, 0, -s, 0, c;
      apply(g);
    }
  }
  {
    const double rr = std::hypot(k(1, 1), k(1, 0));
    if (rr > 0.0) {
      const double c = k(1, 1) / rr, s = -k(1, 0) / rr;
      Eigen::Matrix3d g;
      g << c, -s, 0, s, c, 0, 0, 0, 1;
      apply(g);
    }
  }
  Eigen::Matrix3d r = q.transpose();
  Vec3 signs;
  for (int i = 0; i < 3; ++i) signs(i) = k(i, i) >= 0.0 ? 1.0 : -1.0;
  k = k * signs.asDiagonal();
  r = signs.asDiagonal() * r;

  MetricCamera out;
  out.k = k / k(2, 2);
  // Zero the below-diagonal residue left by floating point.
  out.k(1, 0) = out.k(2, 0) = out.k(2, 1) = 0.0;
  out.r = r;
  out.c = -m.inverse() * p.col(3);
  return out;
}

double reprojection_rms(const ProjectiveReconstruction& recon) {
  return reprojection_rms(recon, Mat4::Identity());
}

double reprojection_rms(const ProjectiveReconstruction& recon, const Mat4& h) {
  if (recon.observations.empty() || recon.points.empty())
    fail(Errc::NoObservations, "reconstruction carries no observations");
  const Mat4 hinv = h.inverse();
  double acc = 0.0;
  for (const Observation& ob : recon.observations) {
    if (ob.camera < 0 || ob.camera >= static_cast<int>(recon.cameras.size()) || ob.point < 0 ||
        ob.point >= static_cast<int>(recon.points.size()))
      fail(Errc::Mismatch, "observation references a missing camera or point");
    const Mat34 pc = recon.cameras[ob.camera].p * hinv;
    const Vec3 x = pc * (h * recon.points[ob.point]);
    const double du = x(0) / x(2) - ob.u;
    const double dv = x(1) / x(2) - ob.v;
    acc += du * du + dv * dv;
  }
  return std::sqrt(acc / static_cast<double>(recon.observations.size()));
}

SegmentStats segment_length_stats(const std::vector<Vec4>& points,
                                  const std::vector<std::array<int, 3>>& triplets, const Mat4& h) {
  if (triplets.size() < 2) fail(Errc::TooFewSegments, "need at least two segments");
  std::vector<double> lengths;
  lengths.reserve(triplets.size());
  const auto euclid = [&](int idx) {
    if (idx < 0 || idx >= static_cast<int>(points.size()))
      fail(Errc::Mismatch, "triplet references a missing point");
    const Vec4 y = h * points[idx];
    return Vec3(y.head<3>() / y(3));
  };
  for (const auto& t : triplets) {
    lengths.push_back((euclid(t[0]) - euclid(t[2])).norm());
  }
  SegmentStats s;
  const double n = static_cast<double>(lengths.size());
  for (double l : lengths) s.mu += l;
  s.mu /= n;
  for (double l : lengths) s.sigma += (l - s.mu) * (l - s.mu);
  s.sigma = std::sqrt(s.sigma / n);
  s.ratio = s.mu != 0.0 ? s.sigma / s.mu : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace slcv
