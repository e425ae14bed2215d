#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace slcv {

using cd = std::complex<double>;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

using Vec3c = Eigen::Vector3cd;
using Vec4c = Eigen::Vector4cd;
using Vec6c = Eigen::Matrix<cd, 6, 1>;
using Vec10c = Eigen::Matrix<cd, 10, 1>;
using Mat3c = Eigen::Matrix3cd;
using Mat4c = Eigen::Matrix4cd;
using Mat10c = Eigen::Matrix<cd, 10, 10>;

enum class Errc {
  DegenerateInput,
  SingularTransform,
  RankDeficient,
  DegenerateCamera,
  DegenerateConfiguration,
  DegeneratePencil,
  NearCenterPlane,
  UnluckyFactorDraw,
  NonGenericConfiguration,
  ZeroMatrix,
  IllConditioned,
  DegenerateAdjoint,
  ContainedLine,
  NonDefiniteIAC,
  ComplexPlane,
  AllInfeasible,
  DegenerateSolution,
  NoObservations,
  TooFewSegments,
  Mismatch,
  SpecInfeasible,
  UnderConstrained,
  InvalidInput,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

namespace tol {
inline constexpr double compare_rel = 1e-9;       ///< up-to-scale equality of homogeneous quantities
inline constexpr double residual = 1e-7;          ///< generic residual bound
inline constexpr double proportional = 1e-12;     ///< singular-value ratio below which vectors count as dependent
inline constexpr double contained = 1e-10;        ///< relative meet norm below which a line lies in a plane
inline constexpr double factor_min = 1e-10;       ///< minimum magnitude of a linear factor being divided out
inline constexpr double small_coeff = 1e-10;      ///< relative frame coefficient considered zero
inline constexpr double frame_cond_max = 1e12;    ///< condition-number limit for coordinate changes
inline constexpr double pencil_degenerate = 1e-11;///< restricted quintic below this (vs its scale bound) is identically zero
inline constexpr double entry_floor = 1e-12;      ///< matrix entry magnitude treated as zero
}  // namespace tol

/// Unit-normalized copy; rejects (near-)zero input.
template <typename Derived>
auto unitize(const Eigen::MatrixBase<Derived>& v) {
  const double n = v.norm();
  if (!(n > 0.0)) fail(Errc::ZeroMatrix, "cannot normalize a zero vector or matrix");
  return (v / n).eval();
}

/// Angle in [0, pi/2] between two homogeneous vectors, zero iff proportional.
template <typename D1, typename D2>
double angular_gap(const Eigen::MatrixBase<D1>& a, const Eigen::MatrixBase<D2>& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) fail(Errc::ZeroMatrix, "angular gap of a zero vector");
  double c = std::abs((a.adjoint() * b).value()) / (na * nb);
  if (c > 1.0) c = 1.0;
  return std::acos(c);
}

/// Up-to-scale equality with relative tolerance.
template <typename D1, typename D2>
bool proportional(const Eigen::MatrixBase<D1>& a, const Eigen::MatrixBase<D2>& b,
                  double rel = tol::compare_rel) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) return false;
  const auto an = (a / na).eval();
  const auto bn = (b / nb).eval();
  const cd dot = (bn.adjoint() * an).value();
  return (an - bn * dot).norm() <= rel;
}

}  // namespace slcv
