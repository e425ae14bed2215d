#pragma once

#include "slcv/types.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace slcv {

/// Homogeneous 3D point (possibly complex); equality is up to nonzero complex scale.
struct HPoint {
  Vec4c v = Vec4c::Zero();
};

/// Homogeneous plane (possibly complex); equality is up to nonzero complex scale.
struct Plane {
  Vec4c v = Vec4c::Zero();
};

/// Spatial line as a 4x4 antisymmetric Plucker matrix (possibly complex).
struct PluckerLine {
  Mat4c m = Mat4c::Zero();
};

/// Conic as a 3x3 symmetric homogeneous matrix (possibly complex).
struct Conic {
  Mat3c c = Mat3c::Zero();
};

/// Finite real camera with its image size in pixels.
struct ProjectionMatrix {
  Mat34 p = Mat34::Zero();
  double width = 0.0;
  double height = 0.0;
};

/// Known pixel geometry: aspect ratio tau = m_y/m_x and skew angle theta.
struct PixelShape {
  double tau = 1.0;
  double theta = 1.57079632679489661923;
};

/// One image measurement of a reconstructed point.
struct Observation {
  int camera = 0;
  int point = 0;
  double u = 0.0;
  double v = 0.0;
};

/// Cameras plus optional structure recovered up to a 4x4 homography.
struct ProjectiveReconstruction {
  std::vector<ProjectionMatrix> cameras;
  std::vector<Vec4> points;
  std::vector<Observation> observations;
  std::vector<std::array<int, 3>> triplets;  ///< indices of aligned equidistant point triplets
};

HPoint make_hpoint(const Vec4c& coords);
Plane make_plane(const Vec4c& coords);

/// Line through two points as the Plucker matrix p q^T - q p^T.
PluckerLine plucker_from_points(const HPoint& p, const HPoint& q);

/// Coordinate permutation swapping the point and plane representations of a line.
PluckerLine plucker_dual(const PluckerLine& l);

/// Intersection point of a line and a plane; empty when the line lies in the plane.
std::optional<HPoint> line_plane_meet(const PluckerLine& l, const Plane& pi);

/// Image of a line under the point homography h.
PluckerLine plucker_transform(const PluckerLine& l, const Mat4c& h);

/// Degree-two monomials (x1^2, x1x2, x1x3, x2^2, x2x3, x3^2).
Vec6c veronese2(const Vec3c& x);

/// Degree-two monomials of a 4-vector, ten entries ordered analogously.
Vec10c veronese3(const Vec4c& x);

/// Conic through >= 5 points as the kernel of the stacked Veronese system.
Conic conic_fit(const std::vector<Vec3c>& points);

/// Coefficient vector pairing with veronese2: (c11, 2c12, 2c13, c22, 2c23, c33).
Vec6c conic_coefficient_vector(const Conic& c);

/// Inverse of conic_coefficient_vector.
Conic conic_from_coefficient_vector(const Vec6c& k);

/// Smallest singular value of the column-normalized 6x6 Veronese matrix; 0 iff the
/// six points lie on a common conic.
double points_on_conic_residual(const std::array<Vec3c, 6>& points);

/// Back-projections of the cyclic points (1, +-i, 0): the two conjugate isotropic lines.
std::pair<PluckerLine, PluckerLine> isotropic_lines(const ProjectionMatrix& p);

/// Null space of the projection matrix.
HPoint optical_center(const ProjectionMatrix& p);

/// Third row of the projection matrix as a plane through the optical center.
Plane principal_plane(const ProjectionMatrix& p);

/// Affine image transform making a camera of the given pixel shape behave square-pixel.
ProjectionMatrix pixel_shape_normalize(const ProjectionMatrix& p, const PixelShape& shape);

/// Adjugate (transposed cofactor matrix) of a real 3x3 matrix.
Eigen::Matrix3d adjugate3(const Eigen::Matrix3d& a);

}  // namespace slcv
