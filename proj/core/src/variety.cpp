#include "slcv/variety.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace slcv {

namespace {

// Bilinear (non-conjugating) dot product; Eigen's dot() conjugates its left arg.
cd bdot(const Vec4c& u, const Vec4c& v) { return u.cwiseProduct(v).sum(); }

// Rotates the global phase so the entry of largest modulus becomes real positive.
Vec4c canonical_phase(const Vec4c& v) {
  int k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const cd pivot = v(k);
  const double mag = std::abs(pivot);
  if (mag == 0.0) return v;
  return v * (std::conj(pivot) / mag);
}

bool nearly_real(const Vec4c& v) {
  return proportional(v, Vec4c(v.conjugate()), 1e-6);
}

// Rows 1..6: degree-two monomials of the six line/plane meets; rows 7..10: the
// same monomials of the reference points.
Mat10c build_system(const Vec4c& pi, const std::array<Mat4c, 6>& lines,
                    const std::array<Vec10c, 4>& ref) {
  Mat10c m;
  for (int j = 0; j < 6; ++j) m.row(j) = veronese3(lines[j] * pi).transpose();
  for (int j = 0; j < 4; ++j) m.row(6 + j) = ref[j].transpose();
  return m;
}

// Hadamard bound on |det|, used as the scale against which a vanishing
// determinant is judged.
double hadamard_row_bound(const Mat10c& m) {
  double b = 1.0;
  for (int i = 0; i < 10; ++i) b *= m.row(i).norm();
  return b;
}

struct ScaledEval {
  cd value = 0.0;   // determinant divided by its linear factors
  double ref = 0.0; // Hadamard bound divided by the same factors
};

// Evaluates the determinant at pi and divides out the reference-point factors
// and (optionally) the center factors. Returns false when the chosen draw puts
// a reference point too close to the plane.
bool eval_scaled(const Vec4c& pi, const std::array<Mat4c, 6>& lines,
                 const EvalSession& session, int draw,
                 const std::array<Vec4c, 3>* centers, ScaledEval* out) {
  const double pin = pi.norm();
  const auto& a = session.points(draw);
  cd denom = session.det(draw);
  for (int j = 0; j < 4; ++j) {
    const cd f = bdot(pi, a[j]);
    if (std::abs(f) <= tol::factor_min * pin) return false;
    denom *= f;
  }
  if (centers) {
    for (const Vec4c& c : *centers) denom *= bdot(pi, c);
  }
  const Mat10c m = build_system(pi, lines, session.veronese(draw));
  const cd d = Eigen::PartialPivLU<Mat10c>(m).determinant();
  out->value = d / denom;
  out->ref = hadamard_row_bound(m) / std::abs(denom);
  return true;
}

// Chebyshev sample abscissae: six primary nodes plus a finer fallback ring for
// pencils whose linear factors vanish near a primary node.
std::vector<double> node_pool() {
  std::vector<double> pool;
  pool.reserve(30);
  for (int s = 0; s < 6; ++s) pool.push_back(std::cos((2 * s + 1) * std::numbers::pi / 12.0));
  for (int s = 0; s < 24; ++s) pool.push_back(std::cos((2 * s + 1) * std::numbers::pi / 48.0));
  return pool;
}

constexpr double node_margin = 1e-8;

}  // namespace

EvalSession::EvalSession(std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (int d = 0; d < max_draws; ++d) {
    while (true) {
      Mat4c m;
      for (int j = 0; j < 4; ++j) {
        Vec4 v;
        do {
          for (int k = 0; k < 4; ++k) v(k) = rng.uniform(-1.0, 1.0);
        } while (v.norm() < 1e-6);
        v.normalize();
        points_[d][j] = v.cast<cd>();
        m.col(j) = points_[d][j];
      }
      const cd det = m.determinant();
      if (std::abs(det) >= 0.05) {
        for (int j = 0; j < 4; ++j) veronese_[d][j] = veronese3(points_[d][j]);
        det_[d] = det;
        break;
      }
    }
  }
}

CameraTriple make_camera_triple(const ProjectionMatrix& p1, const ProjectionMatrix& p2,
                                const ProjectionMatrix& p3, std::uint64_t seed) {
  CameraTriple t{{p1, p2, p3}, {}, {}, {}, {}, Vec4c::Zero(), EvalSession(seed)};
  for (int i = 0; i < 3; ++i) {
    const ProjectionMatrix& cam = t.cameras[i];
    t.centers[i] = optical_center(cam).v;
    t.principal_planes[i] = principal_plane(cam).v;
    const auto [l, lbar] = isotropic_lines(cam);
    t.iso_lines[2 * i] = l.m;
    t.iso_lines[2 * i + 1] = lbar.m;
  }
  for (int i = 0; i < 3; ++i) {
    t.generic[i] = true;
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      if (std::abs(bdot(t.principal_planes[i], t.centers[j])) <= node_margin) t.generic[i] = false;
    }
  }
  // Anchor point on the first isotropic line: its meet with the plane whose
  // coordinate vector equals the first center's. The center is never on that
  // plane, so the meet is a proper point distinct from the center.
  auto meet = line_plane_meet(PluckerLine{t.iso_lines[0]}, Plane{t.centers[0]});
  if (!meet) {
    SplitMix64 rng(SplitMix64(seed).split(0x0A11C4));
    for (int attempt = 0; attempt < 64 && !meet; ++attempt) {
      Vec4c pl;
      for (int k = 0; k < 4; ++k) pl(k) = cd(rng.uniform(-1.0, 1.0), 0.0);
      bool clear = true;
      for (const Vec4c& c : t.centers) {
        if (std::abs(bdot(pl, c)) <= 1e-3 * pl.norm()) clear = false;
      }
      if (clear) meet = line_plane_meet(PluckerLine{t.iso_lines[0]}, Plane{pl});
    }
  }
  if (!meet) fail(Errc::DegenerateConfiguration, "no proper anchor point found on the isotropic line");
  t.r = meet->v;
  return t;
}

cd det_d(const Vec4c& pi, const std::array<Mat4c, 6>& lines, const std::array<Vec4c, 4>& a) {
  Mat4c m;
  std::array<Vec10c, 4> ref;
  for (int j = 0; j < 4; ++j) {
    m.col(j) = a[j];
    ref[j] = veronese3(a[j]);
  }
  const Mat10c sys = build_system(pi, lines, ref);
  return Eigen::PartialPivLU<Mat10c>(sys).determinant();
}

cd eval_f(const Vec4c& pi, const std::array<Mat4c, 6>& lines, const EvalSession& session) {
  ScaledEval e;
  for (int draw = 0; draw < session.draws(); ++draw) {
    if (eval_scaled(pi, lines, session, draw, nullptr, &e)) return e.value;
  }
  fail(Errc::UnluckyFactorDraw, "every reference draw has a point nearly on the plane");
}

cd eval_f(const Vec4c& pi, const std::array<Mat4c, 6>& lines) {
  static const EvalSession session;
  return eval_f(pi, lines, session);
}

cd eval_g(const Vec4c& pi, const CameraTriple& triple) {
  const double pin = pi.norm();
  for (const Vec4c& c : triple.centers) {
    if (std::abs(bdot(pi, c)) <= tol::factor_min * pin)
      fail(Errc::NearCenterPlane, "plane passes too close to a camera center");
  }
  ScaledEval e;
  for (int draw = 0; draw < triple.session.draws(); ++draw) {
    if (eval_scaled(pi, triple.iso_lines, triple.session, draw, &triple.centers, &e)) return e.value;
  }
  fail(Errc::UnluckyFactorDraw, "every reference draw has a point nearly on the plane");
}

Mat4c canonical_frame(const CameraTriple& triple, cd z) {
  const Vec4c q = triple.r + z * triple.centers[0];
  const Vec4c qbar = q.conjugate();

  Mat4c m;
  m.col(0) = triple.centers[0];
  m.col(1) = triple.centers[1];
  m.col(2) = triple.centers[2];
  m.col(3) = q;

  Eigen::JacobiSVD<Mat4c> svd(m);
  if (svd.singularValues()(3) * tol::frame_cond_max <= svd.singularValues()(0))
    fail(Errc::DegenerateConfiguration, "pencil base point is nearly coplanar with the camera centers");

  const Vec4c alpha = Eigen::PartialPivLU<Mat4c>(m).solve(qbar);
  const double amax = alpha.cwiseAbs().maxCoeff();
  for (int i = 0; i < 4; ++i) {
    if (std::abs(alpha(i)) <= 1e-12 * amax)
      fail(Errc::DegenerateConfiguration, "frame coefficient vanishes at this parameter");
  }
  Mat4c t1;
  for (int i = 0; i < 4; ++i) t1.col(i) = alpha(i) * m.col(i);

  Eigen::JacobiSVD<Mat4c> svd1(t1);
  if (svd1.singularValues()(3) * tol::frame_cond_max <= svd1.singularValues()(0))
    fail(Errc::DegenerateConfiguration, "conjugate base point is nearly coplanar with the frame");

  const cd i1{0.0, 1.0};
  Mat4c t2;
  t2 << cd(0), cd(0), cd(0), cd(1),
        cd(0), cd(0), -2.0 * i1, i1,
        cd(0), -2.0 * i1, 2.0 * i1, cd(0),
        4.0 * i1, -2.0 * i1, -2.0 * i1, cd(0);

  return unitize(Mat4c(t2 * t1.inverse()));
}

QuadraticRoots quadratic_roots(cd a, cd b, cd c) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) fail(Errc::InvalidInput, "zero quadratic");
  a /= scale;
  b /= scale;
  c /= scale;
  constexpr double eps = 1e-13;

  if (std::abs(a) <= eps) {
    if (std::abs(b) <= eps) return {cd(1), cd(0), cd(1), cd(0), true};
    return {cd(1), cd(0), -c, b, false};
  }
  if (std::abs(c) <= eps) {
    if (std::abs(b) <= eps) return {cd(0), cd(1), cd(0), cd(1), true};
    return {cd(0), cd(1), -b, a, false};
  }

  const cd disc = b * b - 4.0 * a * c;
  const double dref = std::max(std::abs(b * b), 4.0 * std::abs(a * c));
  if (std::abs(disc) <= 1e-12 * dref) return {-b, 2.0 * a, -b, 2.0 * a, true};

  cd sq = std::sqrt(disc);
  if (std::real(std::conj(b) * sq) < 0.0) sq = -sq;
  const cd h = -0.5 * (b + sq);
  return {h, a, c, h, false};
}

RestrictedQuintic restrict_quintic(const Vec4c& alpha, const Vec4c& beta,
                                   const std::array<Mat4c, 6>& lines,
                                   const std::array<Vec4c, 3>& centers,
                                   const EvalSession& session) {
  static const std::vector<double> pool = node_pool();

  // Nodes killed by a center factor stay killed for every draw; track them so
  // a center-degenerate pencil is reported as such instead of as bad luck.
  int center_safe = 0;
  std::vector<char> center_ok(pool.size(), 0);
  for (std::size_t s = 0; s < pool.size(); ++s) {
    const Vec4c pi = alpha + cd(pool[s]) * beta;
    const double pin = pi.norm();
    if (pin <= 1e-14) continue;
    bool ok = true;
    for (const Vec4c& c : centers) {
      if (std::abs(bdot(pi, c)) <= node_margin * pin * c.norm()) ok = false;
    }
    center_ok[s] = ok ? 1 : 0;
    center_safe += ok ? 1 : 0;
  }
  if (center_safe < 6)
    fail(Errc::DegeneratePencil, "pencil passes too close to a camera center at every sample node");

  for (int draw = 0; draw < session.draws(); ++draw) {
    std::vector<double> nodes;
    nodes.reserve(6);
    for (std::size_t s = 0; s < pool.size() && nodes.size() < 6; ++s) {
      if (!center_ok[s]) continue;
      const Vec4c pi = alpha + cd(pool[s]) * beta;
      const double pin = pi.norm();
      bool ok = true;
      for (const Vec4c& a : session.points(draw)) {
        if (std::abs(bdot(pi, a)) <= node_margin * pin) ok = false;
      }
      if (ok) nodes.push_back(pool[s]);
    }
    if (nodes.size() < 6) continue;

    Eigen::Matrix<cd, 6, 1> values;
    double ref = 0.0;
    bool draw_ok = true;
    for (int s = 0; s < 6 && draw_ok; ++s) {
      const Vec4c pi = alpha + cd(nodes[s]) * beta;
      ScaledEval e;
      draw_ok = eval_scaled(pi, lines, session, draw, &centers, &e);
      values(s) = e.value;
      ref = std::max(ref, e.ref);
    }
    if (!draw_ok) continue;

    Eigen::Matrix<cd, 6, 6> vand;
    for (int s = 0; s < 6; ++s) {
      cd p = 1.0;
      for (int k = 0; k < 6; ++k) {
        vand(s, k) = p;
        p *= nodes[s];
      }
    }
    const Eigen::Matrix<cd, 6, 1> coeff = Eigen::PartialPivLU<Eigen::Matrix<cd, 6, 6>>(vand).solve(values);

    RestrictedQuintic out;
    for (int k = 0; k < 6; ++k) out.c[k] = coeff(k);
    out.ref = ref;
    return out;
  }
  fail(Errc::UnluckyFactorDraw, "no reference draw kept all sample nodes away from its points");
}

PencilQuadratic pencil_quadratic(const CameraTriple& triple, cd z) {
  const Mat4c h = canonical_frame(triple, z);

  std::array<Mat4c, 6> lines;
  for (int j = 0; j < 6; ++j) lines[j] = unitize(Mat4c(h * triple.iso_lines[j] * h.transpose()));
  const std::array<Vec4c, 3> centers = {Vec4c(cd(0), cd(0), cd(0), cd(1)),
                                        Vec4c(cd(0), cd(0), cd(1), cd(1)),
                                        Vec4c(cd(0), cd(1), cd(-1), cd(1))};
  const Vec4c alpha(cd(0), cd(0), cd(1), cd(0));
  const Vec4c beta(cd(0), cd(0), cd(1), cd(-1));

  const RestrictedQuintic rq = restrict_quintic(alpha, beta, lines, centers, triple.session);

  double cmax = 0.0;
  for (const cd& c : rq.c) cmax = std::max(cmax, std::abs(c));
  if (cmax <= tol::pencil_degenerate * rq.ref)
    fail(Errc::DegeneratePencil, "variety vanishes on the entire pencil");

  const double lead = std::max({std::abs(rq.c[3]), std::abs(rq.c[4]), std::abs(rq.c[5])});
  if (lead <= tol::pencil_degenerate * rq.ref)
    fail(Errc::DegeneratePencil, "quadratic part of the pencil restriction vanishes");

  PencilQuadratic out;
  out.a0 = rq.c[3];
  out.b0 = rq.c[4];
  out.c0 = rq.c[5];
  out.mu3_residual =
      std::max({std::abs(rq.c[0]), std::abs(rq.c[1]), std::abs(rq.c[2])}) / lead;
  out.frame = h;
  return out;
}

CandidatePlanePair candidate_planes(const CameraTriple& triple, cd z) {
  const PencilQuadratic pq = pencil_quadratic(triple, z);
  const QuadraticRoots roots = quadratic_roots(pq.a0, pq.b0, pq.c0);

  const Vec4c alpha(cd(0), cd(0), cd(1), cd(0));
  const Vec4c beta(cd(0), cd(0), cd(1), cd(-1));
  const Vec4c p1c = roots.l1 * alpha + roots.m1 * beta;
  const Vec4c p2c = roots.l2 * alpha + roots.m2 * beta;

  CandidatePlanePair out;
  out.z = z;
  out.frame = pq.frame;
  out.chi1 = canonical_phase(unitize(Vec4c(pq.frame.transpose() * p1c)));
  out.chi2 = canonical_phase(unitize(Vec4c(pq.frame.transpose() * p2c)));
  out.xi = canonical_phase(unitize(Vec4c(pq.frame.transpose() * beta)));
  out.q = unitize(Vec4c(triple.r + z * triple.centers[0]));
  out.qbar = out.q.conjugate();
  out.double_root = roots.double_root;
  out.conjugate_pair = !(nearly_real(out.chi1) && nearly_real(out.chi2));
  return out;
}

std::vector<Vec4> quintic_on_line(const Vec4c& alpha, const Vec4c& beta,
                                  const CameraTriple& triple) {
  for (const Vec4c& c : triple.centers) {
    if (std::abs(bdot(alpha, c)) <= 1e-12 * alpha.norm() &&
        std::abs(bdot(beta, c)) <= 1e-12 * beta.norm())
      fail(Errc::DegeneratePencil, "every plane of the pencil passes through a camera center");
  }

  const RestrictedQuintic rq =
      restrict_quintic(alpha, beta, triple.iso_lines, triple.centers, triple.session);

  double cmax = 0.0;
  for (const cd& c : rq.c) cmax = std::max(cmax, std::abs(c));
  if (cmax <= tol::pencil_degenerate * rq.ref)
    fail(Errc::DegeneratePencil, "variety vanishes on the entire pencil");

  int deg = 5;
  while (deg > 0 && std::abs(rq.c[deg]) <= tol::small_coeff * cmax) --deg;
  const bool beta_root = deg < 5;

  std::vector<std::pair<double, Vec4>> found;
  auto consider = [&](const Vec4c& raw, double key) {
    const Vec4c pc = canonical_phase(unitize(raw));
    if (pc.imag().norm() > 1e-6) return;
    Vec4 p = pc.real();
    p.normalize();
    for (const auto& [k, existing] : found) {
      if (angular_gap(existing, p) <= 1e-8) return;
    }
    found.emplace_back(key, p);
  };

  if (deg >= 1) {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -rq.c[i] / rq.c[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);

    std::vector<cd> ts(es.eigenvalues().data(), es.eigenvalues().data() + deg);
    std::sort(ts.begin(), ts.end(), [](cd u, cd v) {
      return std::real(u) != std::real(v) ? std::real(u) < std::real(v)
                                          : std::imag(u) < std::imag(v);
    });
    for (const cd t : ts) {
      if (std::abs(std::imag(t)) > 1e-6 * std::max(1.0, std::abs(std::real(t)))) continue;
      consider(alpha + cd(std::real(t)) * beta, std::real(t));
    }
  }
  if (beta_root) consider(beta, std::numeric_limits<double>::infinity());

  std::vector<Vec4> out;
  out.reserve(found.size());
  for (const auto& [k, p] : found) out.push_back(p);
  return out;
}

}  // namespace slcv
