#include "slcv/search.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <limits>
#include <numbers>
#include <thread>
#include <utility>

namespace slcv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Derivative-free downhill simplex over R^d with standard coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5). Infinite values
/// are legal: they order after every finite value and contract away.
struct SimplexOutcome {
  Eigen::VectorXd x;
  double f = kInf;
  bool converged = false;
  std::vector<double> history;
};

SimplexOutcome nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0, double edge, int max_iters, double ftol) {
  const int d = static_cast<int>(x0.size());
  std::vector<std::pair<Eigen::VectorXd, double>> v;
  v.reserve(d + 1);
  v.emplace_back(x0, f(x0));
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd x = x0;
    x(i) += edge;
    v.emplace_back(x, f(x));
  }
  auto by_value = [](const std::pair<Eigen::VectorXd, double>& a,
                     const std::pair<Eigen::VectorXd, double>& b) { return a.second < b.second; };
  std::stable_sort(v.begin(), v.end(), by_value);

  SimplexOutcome out;
  out.history.reserve(static_cast<std::size_t>(std::max(max_iters, 0)) + 1);
  for (int it = 0; it < max_iters; ++it) {
    out.history.push_back(v.front().second);
    const double spread = v.back().second - v.front().second;
    if (spread < ftol) {  // NaN spread (inf - inf) keeps iterating
      out.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) centroid += v[i].first;
    centroid /= d;
    const Eigen::VectorXd& worst = v[d].first;
    const double f_best = v[0].second;
    const double f_second = v[d - 1].second;
    const double f_worst = v[d].second;

    const Eigen::VectorXd xr = centroid + (centroid - worst);
    const double fr = f(xr);
    bool shrink = false;
    if (fr < f_best) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - worst);
      const double fe = f(xe);
      if (fe < fr)
        v[d] = {xe, fe};
      else
        v[d] = {xr, fr};
    } else if (fr < f_second) {
      v[d] = {xr, fr};
    } else if (fr < f_worst) {
      const Eigen::VectorXd xc = centroid + 0.5 * (xr - centroid);
      const double fc = f(xc);
      if (fc <= fr)
        v[d] = {xc, fc};
      else
        shrink = true;
    } else {
      const Eigen::VectorXd xc = centroid - 0.5 * (centroid - worst);
      const double fc = f(xc);
      if (fc < f_worst)
        v[d] = {xc, fc};
      else
        shrink = true;
    }
    if (shrink) {
      for (int i = 1; i <= d; ++i) {
        v[i].first = v[0].first + 0.5 * (v[i].first - v[0].first);
        v[i].second = f(v[i].first);
      }
    }
    std::stable_sort(v.begin(), v.end(), by_value);
  }
  if (out.history.empty() || out.history.back() != v.front().second)
    out.history.push_back(v.front().second);
  out.x = v.front().first;
  out.f = v.front().second;
  return out;
}

/// Similarity normalization of image coordinates: one isotropic scale for
/// both axes, so the cyclic points (1, +-i, 0) stay fixed and square-pixel
/// residuals keep their meaning in the normalized frame.
Eigen::Matrix3d similarity_norm(const ProjectionMatrix& cam) {
  const double w = cam.width > 0 ? cam.width : 1.0;
  const double h = cam.height > 0 ? cam.height : 1.0;
  const double s = std::max(w, h);
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = 2.0 / s;
  t(1, 1) = 2.0 / s;
  t(0, 2) = -w / s;
  t(1, 2) = -h / s;
  return t;
}

/// Conic through the five transferred meets in one image, fitted and returned
/// in the similarity-normalized frame (unit Frobenius norm).
Conic transfer_conic(const std::array<Vec4c, 5>& meets, const ProjectionMatrix& cam) {
  const Mat3c tc = similarity_norm(cam).cast<cd>();
  const Eigen::Matrix<cd, 3, 4> pc = cam.p.cast<cd>();
  std::vector<Vec3c> pts;
  pts.reserve(5);
  for (const Vec4c& x : meets) {
    const Vec3c img = pc * x;
    // A transferred point at this camera's optical center has no image.
    if (img.norm() <= 1e-10 * pc.norm() * x.norm())
      fail(Errc::NearCenterPlane, "transferred point coincides with the camera center");
    pts.push_back(unitize(Vec3c(tc * img)));
  }
  return conic_fit(pts);
}

/// Takes a conic from the similarity-normalized frame back to pixels.
Conic denormalize_conic(const Conic& normalized, const ProjectionMatrix& cam) {
  const Mat3c tc = similarity_norm(cam).cast<cd>();
  return Conic{unitize(Mat3c(tc.transpose() * normalized.c * tc))};
}

/// Decomposes every upgraded camera P_i H^{-1}.
std::vector<MetricCamera> decompose_all(const std::vector<ProjectionMatrix>& cams,
                                        const Mat4& h) {
  const Mat4 hinv = h.inverse();
  std::vector<MetricCamera> out;
  out.reserve(cams.size());
  for (const ProjectionMatrix& cam : cams)
    out.push_back(decompose_camera({cam.p * hinv, cam.width, cam.height}));
  return out;
}

double rms_or_nan(const ProjectiveReconstruction& recon) {
  if (recon.observations.empty() || recon.points.empty())
    return std::numeric_limits<double>::quiet_NaN();
  return reprojection_rms(recon);
}

}  // namespace

std::vector<cd> sample_grid(const GridSpec& spec) {
  if (spec.n < 1 || spec.m < 1) fail(Errc::InvalidInput, "grid resolutions must be at least 1");
  const int n = spec.n;
  const int m = spec.m;
  std::vector<cd> zs;
  zs.reserve(static_cast<std::size_t>(1 + n * m + (n - 1) * m));
  zs.emplace_back(0.0, 0.0);
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= m; ++k)
      zs.push_back(std::polar(static_cast<double>(j) / n,
                              2.0 * std::numbers::pi * k / m));
  for (int j = 1; j <= n - 1; ++j)
    for (int k = 1; k <= m; ++k)
      zs.push_back(std::polar(static_cast<double>(n) / j,
                              -2.0 * std::numbers::pi * k / m));
  return zs;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SLCV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min(v, 1024L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

GridResult grid_search(const CostContext& context, const GridSpec& spec, int threads) {
  GridResult out;
  out.zs = sample_grid(spec);
  out.samples.resize(out.zs.size());

  const int width = std::max(1, std::min<int>(resolve_threads(threads),
                                              static_cast<int>(out.zs.size())));
  auto worker = [&](int t) {
    for (std::size_t i = static_cast<std::size_t>(t); i < out.zs.size();
         i += static_cast<std::size_t>(width)) {
      const ZCost c = cost_z(out.zs[i], context);
      out.samples[i] = GridSample{c.cost, c.cost_chi1, c.cost_chi2};
    }
  };
  if (width == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(width) - 1);
    for (int t = 1; t < width; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (std::thread& th : pool) th.join();
  }

  std::size_t best = out.zs.size();
  double best_cost = kInf;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    if (out.samples[i].cost < best_cost) {
      best_cost = out.samples[i].cost;
      best = i;
    }
  }
  if (best == out.zs.size())
    fail(Errc::AllInfeasible, "every grid sample has infinite cost");
  out.z0 = out.zs[best];
  out.cost = best_cost;
  out.index = best;
  return out;
}

SearchResult refine(cd z0, const CostContext& context, int max_iters) {
  if (max_iters < 0) fail(Errc::InvalidInput, "negative iteration budget");
  const ZCost start = cost_z(z0, context);
  if (!std::isfinite(start.cost))
    fail(Errc::InvalidInput, "refinement requires a start of finite cost");

  SearchResult out;
  out.z0 = z0;

  cd z1 = z0;
  if (max_iters == 0) {
    out.cost_history = {start.cost};
    out.converged = false;
  } else {
    auto objective = [&context](const Eigen::VectorXd& x) {
      return cost_z(cd(x(0), x(1)), context).cost;
    };
    Eigen::VectorXd x0(2);
    x0 << z0.real(), z0.imag();
    const double edge = 0.02 * std::max(1.0, std::abs(z0));
    const SimplexOutcome best = nelder_mead(objective, x0, edge, max_iters, 1e-12);
    z1 = cd(best.x(0), best.x(1));
    out.cost_history = best.history;
    out.converged = best.converged;
  }

  const ZCost fin = cost_z(z1, context);
  out.z1 = z1;
  out.breakdown = *fin.best;
  out.chosen_plane = fin.cost_chi1 <= fin.cost_chi2 ? fin.pair->chi1 : fin.pair->chi2;
  out.chosen_iac = normalize_iac(
      iac_from_plane(out.chosen_plane, context.triple_indices[0], context.triple, context.cameras)
          .omega);
  return out;
}

UpgradeResult calibrate_slcv(const ProjectiveReconstruction& recon, const CalibrateConfig& config) {
  const int nc = static_cast<int>(recon.cameras.size());
  if (nc < 4)
    fail(Errc::UnderConstrained,
         "calibration needs at least four cameras; with three, every candidate plane is cost-free");

  UpgradeResult result;
  UpgradeDiagnostics& diag = result.diagnostics;
  diag.method = "slcv";
  if (nc == 4)
    diag.warnings.push_back(
        "only four cameras: the minimum for a unique solution is five; result may be ambiguous");

  std::vector<std::array<int, 3>> candidates;
  if (config.triple[0] >= 0 || config.triple[1] >= 0 || config.triple[2] >= 0)
    candidates.push_back(config.triple);
  else
    candidates = {{0, 1, 2}, {1, 0, 2}, {2, 0, 1}};

  CostContext context;
  bool have_context = false;
  for (const std::array<int, 3>& tr : candidates) {
    CostContext attempt = make_cost_context(recon, config.weights, tr, config.seed);
    if (attempt.triple.generic[0]) {
      context = std::move(attempt);
      have_context = true;
      break;
    }
  }
  if (!have_context)
    fail(Errc::NonGenericConfiguration,
         "no admissible camera triple: each candidate first principal plane passes through "
         "another camera center");
  diag.triple = context.triple_indices;

  const GridResult grid = grid_search(context, config.grid, config.threads);
  diag.z0 = grid.z0;
  diag.grid_cost = grid.cost;

  // The cost field is a web of conical valleys, and with few extra cameras the
  // grid argmin regularly sits in a near-miss valley whose floor is orders of
  // magnitude above the solution's. Descend from the best-ranked nodes until
  // one start lands decisively below the grid floor.
  std::vector<std::size_t> order(grid.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&grid](std::size_t a, std::size_t b) {
    return grid.samples[a].cost < grid.samples[b].cost;
  });
  const double decisive = std::max(1e-12, grid.cost * 1e-6);
  SearchResult refined;
  double best_final = kInf;
  std::size_t best_start = grid.index;
  for (int rank = 0; rank < std::max(1, config.max_starts) &&
                     rank < static_cast<int>(order.size());
       ++rank) {
    const std::size_t idx = order[rank];
    if (!std::isfinite(grid.samples[idx].cost)) break;
    const SearchResult attempt = refine(grid.zs[idx], context, config.max_refine_iters);
    if (attempt.breakdown.c0 < best_final) {
      best_final = attempt.breakdown.c0;
      refined = attempt;
      best_start = idx;
    }
    if (best_final <= decisive) break;
  }
  if (best_start != grid.index)
    diag.warnings.push_back(
        "the grid argmin's valley was shallow; the refined solution descends from another node");
  diag.z1 = refined.z1;
  diag.final_cost = refined.breakdown.c0;
  diag.converged = refined.converged;
  diag.breakdown = refined.breakdown;

  Vec4c plane = refined.chosen_plane;
  IAC iac = refined.chosen_iac;
  Mat4 h;
  try {
    h = homography_from_plane_iac(plane, iac, context.triple.cameras[0]);
  } catch (const Error& e) {
    if (e.code() != Errc::ComplexPlane) throw;
    // The cheaper candidate kept a complex component; its partner plane can
    // still be real (the pair is closed under conjugation).
    const ZCost zc = cost_z(refined.z1, context);
    const Vec4c other = zc.cost_chi1 <= zc.cost_chi2 ? zc.pair->chi2 : zc.pair->chi1;
    plane = other;
    iac = normalize_iac(
        iac_from_plane(other, context.triple_indices[0], context.triple, context.cameras).omega);
    h = homography_from_plane_iac(plane, iac, context.triple.cameras[0]);
    diag.warnings.push_back("cheaper candidate plane was complex; upgraded with its partner");
    diag.final_cost = zc.cost_chi1 <= zc.cost_chi2 ? zc.cost_chi2 : zc.cost_chi1;
  }

  result.h = h;
  result.plane = plane;
  result.iac1 = iac;
  result.cameras = decompose_all(recon.cameras, h);
  result.reprojection_rms = recon.observations.empty() || recon.points.empty()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : reprojection_rms(recon, h);
  return result;
}

double cyclic_transfer_cost(const Vec4c& pi, const ProjectiveReconstruction& recon,
                            const std::array<PluckerLine, 5>& selected_lines) {
  if (recon.cameras.empty()) fail(Errc::InvalidInput, "transfer cost needs at least one camera");

  std::array<Vec4c, 5> meets;
  const Plane plane{pi};
  for (int j = 0; j < 5; ++j) {
    const std::optional<HPoint> x = line_plane_meet(selected_lines[j], plane);
    if (!x)
      fail(Errc::ContainedLine, "a selected isotropic line lies in the plane being scored");
    meets[j] = x->v;
  }

  double total = 0.0;
  const cd i_unit(0.0, 1.0);
  for (const ProjectionMatrix& cam : recon.cameras) {
    const Mat3c w = unitize(transfer_conic(meets, cam).c);
    // I^T w I with I = (1, i, 0) and its conjugate direction.
    const cd at_i = w(0, 0) - w(1, 1) + i_unit * (w(0, 1) + w(1, 0));
    const cd at_ibar = w(0, 0) - w(1, 1) - i_unit * (w(0, 1) + w(1, 0));
    total += std::abs(at_i) + std::abs(at_ibar);
  }
  return total;
}

Vec4 plane_grid_search_3d(const ProjectiveReconstruction& recon, const PlaneBox& box, int steps,
                          bool do_refine) {
  if (steps < 1) fail(Errc::InvalidInput, "grid steps must be at least 1");
  if (recon.cameras.size() < 5)
    fail(Errc::InvalidInput, "the transfer cost needs five cameras with isotropic lines");
  for (int a = 0; a < 3; ++a)
    if (!(box.lo(a) <= box.hi(a))) fail(Errc::InvalidInput, "empty search box");

  std::array<PluckerLine, 5> lines;
  for (int k = 0; k < 5; ++k) lines[k] = isotropic_lines(recon.cameras[k]).first;

  auto score = [&](const Vec3& n) -> double {
    Vec4c pi;
    pi << cd(n(0), 0.0), cd(n(1), 0.0), cd(n(2), 0.0), cd(1.0, 0.0);
    try {
      return cyclic_transfer_cost(pi, recon, lines);
    } catch (const Error&) {
      return kInf;
    }
  };

  const Vec3 cell = (box.hi - box.lo) / steps;
  std::vector<std::pair<double, Vec3>> cells;
  cells.reserve(static_cast<std::size_t>(steps) * steps * steps);
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j)
      for (int k = 0; k < steps; ++k) {
        Vec3 n;
        n << box.lo(0) + (i + 0.5) * cell(0), box.lo(1) + (j + 0.5) * cell(1),
            box.lo(2) + (k + 0.5) * cell(2);
        cells.emplace_back(score(n), n);
      }
  std::stable_sort(cells.begin(), cells.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (!std::isfinite(cells.front().first))
    fail(Errc::AllInfeasible, "every cell center has infinite transfer cost");
  Vec3 best_n = cells.front().second;
  double best_cost = cells.front().first;

  if (do_refine) {
    auto objective = [&score](const Eigen::VectorXd& x) { return score(Vec3(x(0), x(1), x(2))); };
    // This cost is a web of conical valleys, and the coarse argmin regularly
    // sits in a near-miss valley whose floor never gets small. Descend from
    // the best-ranked cell centers, restarting each descent with fresh small
    // simplexes (collapsed, valley-aligned shapes stall otherwise), until one
    // start lands decisively below the coarse floor.
    const double decisive = std::max(1e-12, best_cost * 1e-6);
    const int max_starts = std::min<std::size_t>(24, cells.size());
    for (int rank = 0; rank < max_starts; ++rank) {
      if (!std::isfinite(cells[rank].first)) break;
      double edge = 0.5 * std::max({cell(0), cell(1), cell(2), 2e-6});
      Eigen::VectorXd x = cells[rank].second;
      double f = cells[rank].first;
      for (int pass = 0; pass < 4; ++pass) {
        const SimplexOutcome best = nelder_mead(objective, x, edge, 400, 1e-15);
        if (best.f < f) {
          f = best.f;
          x = best.x;
        }
        edge *= 0.05;
      }
      if (f < best_cost) {
        best_cost = f;
        best_n = Vec3(x(0), x(1), x(2));
      }
      if (best_cost <= decisive) break;
    }
  }

  Vec4 pi;
  pi << best_n(0), best_n(1), best_n(2), 1.0;
  return pi;
}

UpgradeResult calibrate_grid3d(const ProjectiveReconstruction& recon, const PlaneBox& box,
                               int steps) {
  const Vec4 plane = plane_grid_search_3d(recon, box, steps, true);
  const Vec4c pic = plane.cast<cd>();

  std::array<PluckerLine, 5> lines;
  for (int k = 0; k < 5; ++k) lines[k] = isotropic_lines(recon.cameras[k]).first;
  std::array<Vec4c, 5> meets;
  const Plane pl{pic};
  for (int j = 0; j < 5; ++j) {
    const std::optional<HPoint> x = line_plane_meet(lines[j], pl);
    if (!x) fail(Errc::ContainedLine, "recovered plane contains a selected isotropic line");
    meets[j] = x->v;
  }
  const IAC iac =
      normalize_iac(denormalize_conic(transfer_conic(meets, recon.cameras[0]), recon.cameras[0]));

  UpgradeResult result;
  result.diagnostics.method = "grid3d";
  result.plane = unitize(pic);
  result.iac1 = iac;
  result.h = homography_from_plane_iac(result.plane, iac, recon.cameras[0]);
  result.cameras = decompose_all(recon.cameras, result.h);
  result.reprojection_rms = recon.observations.empty() || recon.points.empty()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : reprojection_rms(recon, result.h);
  return result;
}

UpgradeResult calibrate_daq(const ProjectiveReconstruction& recon,
                            const std::vector<Vec2>& assumed_pp) {
  const std::size_t nc = recon.cameras.size();
  if (nc == 0) fail(Errc::InvalidInput, "no cameras");
  if (!assumed_pp.empty() && assumed_pp.size() != nc)
    fail(Errc::Mismatch, "one assumed principal point per camera expected");

  // Parameters of the symmetric 4x4 dual quadric, upper triangle row-major.
  static constexpr int kIdx[10][2] = {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1},
                                      {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};

  Eigen::MatrixXd rows(4 * static_cast<Eigen::Index>(nc), 10);
  for (std::size_t k = 0; k < nc; ++k) {
    const ProjectionMatrix& cam = recon.cameras[k];
    const double u0 = assumed_pp.empty() ? 0.5 * cam.width : assumed_pp[k](0);
    const double v0 = assumed_pp.empty() ? 0.5 * cam.height : assumed_pp[k](1);
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
    t(0, 2) = -u0;
    t(1, 2) = -v0;
    Mat34 p = t * cam.p;
    p /= p.norm();

    // Coefficient of parameter q_cd in the (a,b) entry of P Q P^T.
    auto coef = [&p](int a, int b, int param) {
      const int c = kIdx[param][0];
      const int d = kIdx[param][1];
      double v = p(a, c) * p(b, d);
      if (c != d) v += p(a, d) * p(b, c);
      return v;
    };
    const Eigen::Index r0 = 4 * static_cast<Eigen::Index>(k);
    for (int param = 0; param < 10; ++param) {
      rows(r0 + 0, param) = coef(0, 1, param);
      rows(r0 + 1, param) = coef(0, 2, param);
      rows(r0 + 2, param) = coef(1, 2, param);
      rows(r0 + 3, param) = coef(0, 0, param) - coef(1, 1, param);
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  Eigen::VectorXd sv = Eigen::VectorXd::Zero(10);
  sv.head(svd.singularValues().size()) = svd.singularValues();
  if (sv(8) <= 1e-10 * sv(0))
    fail(Errc::DegenerateSolution,
         "dual quadric underdetermined: the square-pixel constraints admit more than one "
         "solution");
  const Eigen::VectorXd q10 = svd.matrixV().col(9);

  Mat4 q = Mat4::Zero();
  for (int param = 0; param < 10; ++param) {
    q(kIdx[param][0], kIdx[param][1]) = q10(param);
    q(kIdx[param][1], kIdx[param][0]) = q10(param);
  }

  Eigen::SelfAdjointEigenSolver<Mat4> eig(q);
  Vec4 lambda = eig.eigenvalues();
  Mat4 vecs = eig.eigenvectors();
  int positive = 0;
  for (int i = 0; i < 4; ++i)
    if (lambda(i) > 0) ++positive;
  if (positive < 2) lambda = -lambda;  // flip the overall sign toward PSD

  int zero_at = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(lambda(i)) < std::abs(lambda(zero_at))) zero_at = i;

  const Vec4 plane = vecs.col(zero_at).normalized();
  Mat4 rank3 = Mat4::Zero();
  for (int i = 0; i < 4; ++i) {
    if (i == zero_at) continue;
    rank3 += lambda(i) * vecs.col(i) * vecs.col(i).transpose();
  }

  const Eigen::Matrix3d diac1 = recon.cameras[0].p * rank3 * recon.cameras[0].p.transpose();
  const Eigen::Matrix3d omega1 = adjugate3(diac1);
  const IAC iac = normalize_iac(Conic{omega1.cast<cd>()});

  UpgradeResult result;
  result.diagnostics.method = "daq";
  result.plane = unitize(plane.cast<cd>().eval());
  result.iac1 = iac;
  result.h = homography_from_plane_iac(result.plane, iac, recon.cameras[0]);
  result.cameras = decompose_all(recon.cameras, result.h);
  result.reprojection_rms = rms_or_nan(recon);
  return result;
}

std::pair<double, double> diac_square_pixel_residual(const Conic& omega_star) {
  const Mat3c& w = omega_star.c;
  const double scale = w.squaredNorm();
  if (scale == 0.0) fail(Errc::ZeroMatrix, "zero dual conic");
  const double r1 = std::abs(w(0, 1) * w(2, 2) - w(0, 2) * w(1, 2)) / scale;
  const double r2 =
      std::abs(w(2, 2) * w(0, 0) - w(0, 2) * w(0, 2) - (w(2, 2) * w(1, 1) - w(1, 2) * w(1, 2))) /
      scale;
  return {r1, r2};
}

}  // namespace slcv
