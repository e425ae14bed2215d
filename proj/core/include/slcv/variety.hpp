#pragma once

#include "slcv/geometry.hpp"
#include "slcv/rng.hpp"

#include <array>
#include <vector>

namespace slcv {

/// Seeded draws of four generic reference points used to factor the 10x10
/// determinant. Holds the primary draw plus alternates so evaluations can fall
/// back on unlucky factor magnitudes without mutating shared state.
class EvalSession {
 public:
  static constexpr int max_draws = 6;

  explicit EvalSession(std::uint64_t seed = 0x51C5EEDULL);

  int draws() const { return max_draws; }
  const std::array<Vec4c, 4>& points(int draw) const { return points_[draw]; }
  const std::array<Vec10c, 4>& veronese(int draw) const { return veronese_[draw]; }
  cd det(int draw) const { return det_[draw]; }

 private:
  std::array<std::array<Vec4c, 4>, max_draws> points_;
  std::array<std::array<Vec10c, 4>, max_draws> veronese_;
  std::array<cd, max_draws> det_;
};

/// Three cameras with the derived geometry the candidate-plane search needs.
struct CameraTriple {
  std::array<ProjectionMatrix, 3> cameras;
  std::array<Vec4c, 3> centers;           ///< unit norm, real entries
  std::array<Vec4c, 3> principal_planes;  ///< unit norm, real entries
  std::array<Mat4c, 6> iso_lines;         ///< l1, l1bar, l2, l2bar, l3, l3bar; unit Frobenius
  std::array<bool, 3> generic;            ///< principal plane avoids the other two centers
  Vec4c r;                                ///< fixed point on l1 anchoring q = r + z*C1
  EvalSession session;
};

CameraTriple make_camera_triple(const ProjectionMatrix& p1, const ProjectionMatrix& p2,
                                const ProjectionMatrix& p3, std::uint64_t seed = 0x51C5EEDULL);

/// 10x10 determinant det(v2(L1 pi), ..., v2(L6 pi), v2(a1), ..., v2(a4)); zero iff
/// the six meets and the four reference points lie on a common quadric.
cd det_d(const Vec4c& pi, const std::array<Mat4c, 6>& lines, const std::array<Vec4c, 4>& a);

/// Degree-8 variety polynomial: det_d divided by its reference-point factors.
/// Independent of the session draw; scale fixed by the line normalization.
cd eval_f(const Vec4c& pi, const std::array<Mat4c, 6>& lines, const EvalSession& session);

/// Same, with a process-wide fixed reference session.
cd eval_f(const Vec4c& pi, const std::array<Mat4c, 6>& lines);

/// Degree-5 candidate-plane polynomial: eval_f divided by the three center factors.
cd eval_g(const Vec4c& pi, const CameraTriple& triple);

/// Coordinate change sending C1, C2, C3, q = r + z*C1, conj(q) to the canonical
/// frame (0,0,0,1), (0,0,1,1), (0,1,-1,1), (1,i,0,0), (1,-i,0,0).
Mat4c canonical_frame(const CameraTriple& triple, cd z);

/// Roots of a*lambda^2 + b*lambda*mu + c*mu^2 as projective pairs (lambda:mu),
/// computed with the cancellation-free branch of the quadratic formula.
struct QuadraticRoots {
  cd l1, m1;
  cd l2, m2;
  bool double_root = false;
};

QuadraticRoots quadratic_roots(cd a, cd b, cd c);

/// Quadratic factor of the variety along the canonical pencil.
struct PencilQuadratic {
  cd a0, b0, c0;        ///< coefficients of a0*lambda^2 + b0*lambda*mu + c0*mu^2
  double mu3_residual;  ///< relative mass of the lambda^5, lambda^4 mu, lambda^3 mu^2 terms
  Mat4c frame;
};

PencilQuadratic pencil_quadratic(const CameraTriple& triple, cd z);

/// The two candidate planes attached to a parameter z.
struct CandidatePlanePair {
  cd z;
  Vec4c chi1, chi2;
  Vec4c xi;       ///< pencil generator through C2, original coordinates
  Vec4c q, qbar;  ///< pencil base points on l1 and l1bar
  Mat4c frame;
  bool conjugate_pair = false;
  bool double_root = false;
};

CandidatePlanePair candidate_planes(const CameraTriple& triple, cd z);

/// Degree-5 coefficients of the variety restricted to lambda*alpha + mu*beta.
/// c[k] multiplies lambda^(5-k) mu^k; ref is the magnitude scale against which an
/// identically zero restriction is judged.
struct RestrictedQuintic {
  std::array<cd, 6> c;
  double ref;
};

RestrictedQuintic restrict_quintic(const Vec4c& alpha, const Vec4c& beta,
                                   const std::array<Mat4c, 6>& lines,
                                   const std::array<Vec4c, 3>& centers,
                                   const EvalSession& session);

/// Real planes in the pencil lambda*alpha + mu*beta on which the variety vanishes.
std::vector<Vec4> quintic_on_line(const Vec4c& alpha, const Vec4c& beta,
                                  const CameraTriple& triple);

}  // namespace slcv
