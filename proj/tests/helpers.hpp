#pragma once

#include "slcv/simkit.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

// Shared fixtures and comparison utilities for the test suites.
namespace testutil {

using namespace slcv;

/// Relative residual of the best least-squares fit a = s * b over complex s;
/// ~0 iff the two matrices (or vectors) are proportional.
template <typename A, typename B>
double prop_gap(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double nb2 = b.squaredNorm();
  const double na = a.norm();
  if (!(nb2 > 0.0) || !(na > 0.0)) return 1.0;
  const cd s = b.template cast<cd>().conjugate().cwiseProduct(a.template cast<cd>()).sum() / nb2;
  return (a.template cast<cd>() - s * b.template cast<cd>()).norm() / na;
}

inline Eigen::Matrix3d random_rotation(SplitMix64& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  while (q.norm() < 1e-6) q = Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

inline Vec3 random_vec3(SplitMix64& rng, double scale = 1.0) {
  return Vec3(rng.normal(), rng.normal(), rng.normal()) * scale;
}

inline Vec4c random_vec4c(SplitMix64& rng) {
  Vec4c v;
  for (int i = 0; i < 4; ++i) v(i) = cd(rng.normal(), rng.normal());
  return v;
}

inline Vec4c random_real_plane(SplitMix64& rng) {
  Vec4 v(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return unitize(v).cast<cd>();
}

inline Mat3 square_k(double alpha, double u0, double v0) {
  Mat3 k;
  k << alpha, 0.0, u0, 0.0, alpha, v0, 0.0, 0.0, 1.0;
  return k;
}

inline Mat34 compose_p(const Mat3& k, const Mat3& r, const Vec3& c) {
  Mat34 p;
  p.leftCols<3>() = k * r;
  p.col(3) = -k * r * c;
  return p;
}

inline ProjectionMatrix make_camera(const Mat3& k, const Mat3& r, const Vec3& c,
                                    double w = 1280.0, double h = 960.0) {
  return ProjectionMatrix{compose_p(k, r, c), w, h};
}

/// Random square-pixel camera placed on a sphere around the origin.
inline ProjectionMatrix random_square_camera(SplitMix64& rng, double w = 1280.0,
                                             double h = 960.0) {
  const Mat3 k = square_k(rng.uniform(900.0, 1800.0), w / 2 + rng.uniform(-50.0, 50.0),
                          h / 2 + rng.uniform(-50.0, 50.0));
  const Mat3 r = random_rotation(rng);
  Vec3 c = random_vec3(rng);
  while (c.norm() < 0.5) c = random_vec3(rng);
  c *= 5.0 / c.norm();
  return make_camera(k, r, c, w, h);
}

/// Plane spanned by the rows' orthogonal complement: the kernel vector of the
/// stacked point coordinates (all given points lie on the returned plane).
inline Vec4c plane_through(const std::vector<Vec4c>& points) {
  Eigen::MatrixXcd rows(points.size(), 4);
  for (std::size_t i = 0; i < points.size(); ++i) rows.row(i) = points[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeFullV);
  return unitize(Vec4c(svd.matrixV().col(3)));
}

/// Standard five-camera noiseless scene used across the suites.
inline Scene default_scene(std::uint64_t seed, int n_cameras = 5, int n_points = 30) {
  SceneSpec spec;
  spec.n_cameras = n_cameras;
  spec.n_points = n_points;
  spec.seed = seed;
  return make_scene(spec);
}

inline CameraTriple triple_of(const Scene& scene) {
  return make_camera_triple(scene.recon.cameras[0], scene.recon.cameras[1],
                            scene.recon.cameras[2]);
}

/// The pencil parameter whose base point q = r + z*C1 lies on the given plane.
inline cd z_for_plane(const CameraTriple& triple, const Vec4c& pi) {
  const cd num = (pi.transpose() * triple.r).value();
  const cd den = (pi.transpose() * triple.centers[0]).value();
  return -num / den;
}

/// Interpolates f(t) on n Chebyshev nodes and returns the n polynomial
/// coefficients c[k] of t^k (an independent cross-check of library results).
inline Eigen::VectorXcd poly_fit(int n, const std::function<cd(double)>& f) {
  Eigen::MatrixXcd vand(n, n);
  Eigen::VectorXcd rhs(n);
  for (int s = 0; s < n; ++s) {
    const double t = 2.0 * std::cos((2.0 * s + 1.0) * std::numbers::pi / (2.0 * n));
    cd p = 1.0;
    for (int k = 0; k < n; ++k) {
      vand(s, k) = p;
      p *= t;
    }
    rhs(s) = f(t);
  }
  return vand.partialPivLu().solve(rhs);
}

}  // namespace testutil

/// Asserts that the expression throws slcv::Error with the given code.
#define CHECK_ERRC(expr, errc)                                            \
  do {                                                                    \
    bool thrown_ = false;                                                 \
    try {                                                                 \
      (void)(expr);                                                       \
    } catch (const slcv::Error& e_) {                                     \
      thrown_ = true;                                                     \
      CHECK_MESSAGE(e_.code() == (errc), "unexpected error: ", e_.what()); \
    }                                                                     \
    CHECK_MESSAGE(thrown_, "expected an error from: " #expr);             \
  } while (0)
