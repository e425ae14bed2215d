#include "slcv/geometry.hpp"

#include <Eigen/SVD>

namespace slcv {

namespace {

/// Ratio of smallest to largest singular value; 0 for rank-deficient input.
template <typename Mat>
double sv_ratio(const Mat& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.template cast<cd>());
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

Mat4c antisym_from_pair(const Vec4c& p, const Vec4c& q) {
  return p * q.transpose() - q * p.transpose();
}

}  // namespace

HPoint make_hpoint(const Vec4c& coords) { return {unitize(coords)}; }

Plane make_plane(const Vec4c& coords) { return {unitize(coords)}; }

PluckerLine plucker_from_points(const HPoint& p, const HPoint& q) {
  Eigen::Matrix<cd, 2, 4> stack;
  stack.row(0) = p.v.transpose();
  stack.row(1) = q.v.transpose();
  if (sv_ratio(stack) < tol::proportional)
    fail(Errc::DegenerateInput, "plucker_from_points: proportional points");
  return {unitize(antisym_from_pair(p.v, q.v))};
}

PluckerLine plucker_dual(const PluckerLine& l) {
  const Mat4c& m = l.m;
  Mat4c d = Mat4c::Zero();
  d(0, 1) = m(2, 3);
  d(0, 2) = m(3, 1);
  d(0, 3) = m(1, 2);
  d(1, 2) = m(0, 3);
  d(1, 3) = m(2, 0);
  d(2, 3) = m(0, 1);
  d(1, 0) = -d(0, 1);
  d(2, 0) = -d(0, 2);
  d(3, 0) = -d(0, 3);
  d(2, 1) = -d(1, 2);
  d(3, 1) = -d(1, 3);
  d(3, 2) = -d(2, 3);
  return {d};
}

std::optional<HPoint> line_plane_meet(const PluckerLine& l, const Plane& pi) {
  const Vec4c x = l.m * pi.v;
  if (x.norm() <= tol::contained * l.m.norm() * pi.v.norm()) return std::nullopt;
  return HPoint{unitize(x)};
}

PluckerLine plucker_transform(const PluckerLine& l, const Mat4c& h) {
  if (sv_ratio(h) < tol::proportional)
    fail(Errc::SingularTransform, "plucker_transform: singular homography");
  return {unitize(h * l.m * h.transpose())};
}

Vec6c veronese2(const Vec3c& x) {
  Vec6c v;
  v << x(0) * x(0), x(0) * x(1), x(0) * x(2), x(1) * x(1), x(1) * x(2), x(2) * x(2);
  return v;
}

Vec10c veronese3(const Vec4c& x) {
  Vec10c v;
  v << x(0) * x(0), x(0) * x(1), x(0) * x(2), x(0) * x(3), x(1) * x(1), x(1) * x(2),
      x(1) * x(3), x(2) * x(2), x(2) * x(3), x(3) * x(3);
  return v;
}

Conic conic_fit(const std::vector<Vec3c>& points) {
  if (points.size() < 5) fail(Errc::InvalidInput, "conic_fit: need at least five points");
  Eigen::MatrixXcd rows(points.size(), 6);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].norm() > 0.0)) fail(Errc::DegenerateInput, "conic_fit: zero point");
    rows.row(i) = unitize(veronese2(unitize(points[i]))).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeFullV);
  Eigen::Matrix<double, 6, 1> sv = Eigen::Matrix<double, 6, 1>::Zero();
  sv.head(svd.singularValues().size()) = svd.singularValues();
  if (sv(4) <= 1e-10 * sv(0))
    fail(Errc::RankDeficient, "conic_fit: conic through the points is not unique");
  const Vec6c kernel = svd.matrixV().col(5);
  return conic_from_coefficient_vector(kernel);
}

Vec6c conic_coefficient_vector(const Conic& c) {
  Vec6c k;
  k << c.c(0, 0), 2.0 * c.c(0, 1), 2.0 * c.c(0, 2), c.c(1, 1), 2.0 * c.c(1, 2), c.c(2, 2);
  return k;
}

Conic conic_from_coefficient_vector(const Vec6c& k) {
  Mat3c c;
  c << k(0), k(1) / 2.0, k(2) / 2.0,
      k(1) / 2.0, k(3), k(4) / 2.0,
      k(2) / 2.0, k(4) / 2.0, k(5);
  return {unitize(c)};
}

double points_on_conic_residual(const std::array<Vec3c, 6>& points) {
  Eigen::Matrix<cd, 6, 6> m;
  for (int i = 0; i < 6; ++i) {
    const Vec6c col = veronese2(points[i]);
    if (!(col.norm() > 0.0)) fail(Errc::DegenerateInput, "points_on_conic_residual: zero point");
    m.col(i) = col / col.norm();
  }
  Eigen::JacobiSVD<Eigen::Matrix<cd, 6, 6>> svd(m);
  return svd.singularValues()(5);
}

std::pair<PluckerLine, PluckerLine> isotropic_lines(const ProjectionMatrix& p) {
  if (sv_ratio(p.p) < tol::proportional)
    fail(Errc::DegenerateCamera, "isotropic_lines: rank-deficient projection matrix");
  const Vec4c p1 = p.p.row(0).transpose().cast<cd>();
  const Vec4c p2 = p.p.row(1).transpose().cast<cd>();
  const Vec4c p3 = p.p.row(2).transpose().cast<cd>();
  const cd i(0.0, 1.0);
  const PluckerLine l{unitize(plucker_dual({antisym_from_pair(p3, p2 + i * p1)}).m)};
  const PluckerLine lbar{unitize(plucker_dual({antisym_from_pair(p3, p2 - i * p1)}).m)};
  return {l, lbar};
}

HPoint optical_center(const ProjectionMatrix& p) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.p, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(2) < tol::proportional * s(0))
    fail(Errc::DegenerateCamera, "optical_center: rank-deficient projection matrix");
  Vec4 c = svd.matrixV().col(3);
  int imax = 0;
  c.cwiseAbs().maxCoeff(&imax);
  if (c(imax) < 0.0) c = -c;
  return {unitize(c).cast<cd>()};
}

Plane principal_plane(const ProjectionMatrix& p) {
  return {unitize(p.p.row(2).transpose()).cast<cd>()};
}

ProjectionMatrix pixel_shape_normalize(const ProjectionMatrix& p, const PixelShape& shape) {
  if (!(shape.tau > 0.0) || !(shape.theta > 0.0) || !(shape.theta < 3.14159265358979323846))
    fail(Errc::InvalidInput, "pixel_shape_normalize: invalid pixel shape");
  Mat3 a;
  a << shape.tau, std::cos(shape.theta), 0.0,
      0.0, std::sin(shape.theta), 0.0,
      0.0, 0.0, 1.0;
  return {a * p.p, p.width, p.height};
}

Eigen::Matrix3d adjugate3(const Eigen::Matrix3d& a) {
  Eigen::Matrix3d adj;
  adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return adj;
}

}  // namespace slcv
