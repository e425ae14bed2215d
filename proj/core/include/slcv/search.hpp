#pragma once

#include "slcv/upgrade.hpp"

#include <utility>
#include <vector>

namespace slcv {

/// Radial/angular resolution of the complex-parameter sampling grid.
struct GridSpec {
  int n = 50;
  int m = 50;
};

/// The grid: {0}, then the closed unit disk (radius j/n, j ascending; angle
/// index k = 1..m), then the disk complement (radius n/j, angle negated).
/// Size is exactly 1 + n*m + (n-1)*m.
std::vector<cd> sample_grid(const GridSpec& spec);

/// Slim per-sample record kept for surface export.
struct GridSample {
  double cost = 0.0;
  double cost_chi1 = 0.0;
  double cost_chi2 = 0.0;
};

struct GridResult {
  cd z0 = 0.0;
  double cost = 0.0;
  std::size_t index = 0;
  std::vector<cd> zs;
  std::vector<GridSample> samples;
};

/// Evaluates the cost on the whole grid (parallel) and takes the argmin with
/// first-index tie-breaking. threads = 0 resolves SLCV_THREADS, then hardware.
GridResult grid_search(const CostContext& context, const GridSpec& spec, int threads = 0);

/// Resolved parallelism width for grid evaluation.
int resolve_threads(int requested = 0);

/// Outcome of the local refinement stage.
struct SearchResult {
  cd z0 = 0.0;
  cd z1 = 0.0;
  Vec4c chosen_plane = Vec4c::Zero();
  IAC chosen_iac;
  std::vector<double> cost_history;
  CostBreakdown breakdown;
  bool converged = true;
};

/// Derivative-free simplex descent over (Re z, Im z) from a finite-cost start;
/// never returns a cost above the start. max_iters = 0 returns the start.
SearchResult refine(cd z0, const CostContext& context, int max_iters = 500);

/// Options of the full calibration pipeline.
struct CalibrateConfig {
  GridSpec grid;
  CostWeights weights;
  std::array<int, 3> triple = {-1, -1, -1};  ///< -1 -> automatic selection
  int max_refine_iters = 500;
  int max_starts = 120;  ///< refinement starts taken from the best grid nodes
  int threads = 0;
  std::uint64_t seed = 0x51C5EEDULL;
};

/// Full pipeline: triple selection, grid search, refinement, Euclidean upgrade.
UpgradeResult calibrate_slcv(const ProjectiveReconstruction& recon,
                             const CalibrateConfig& config = {});

/// Square-pixel residual of five cyclic points transferred by the plane into
/// every image.
double cyclic_transfer_cost(const Vec4c& pi, const ProjectiveReconstruction& recon,
                            const std::array<PluckerLine, 5>& selected_lines);

/// Axis-aligned box for the direct 3D plane search, bounds on n of pi=(n,1).
struct PlaneBox {
  Vec3 lo = Vec3(-1, -1, -1);
  Vec3 hi = Vec3(1, 1, 1);
};

/// Direct grid search over plane coordinates with the transfer cost; samples
/// cell centers (steps=1 evaluates only the box center), then simplex-refines.
Vec4 plane_grid_search_3d(const ProjectiveReconstruction& recon, const PlaneBox& box, int steps,
                          bool do_refine = true);

/// Baseline calibration built on plane_grid_search_3d.
UpgradeResult calibrate_grid3d(const ProjectiveReconstruction& recon, const PlaneBox& box,
                               int steps);

/// Linear baseline assuming the principal points: solves for the rank-3 dual
/// quadric, reads the plane off its kernel, and upgrades. Empty assumed_pp
/// defaults every camera to its image center.
UpgradeResult calibrate_daq(const ProjectiveReconstruction& recon,
                            const std::vector<Vec2>& assumed_pp = {});

/// Rank-3 dual quadric of the plane-pair tangency structure.
struct DualQuadric {
  Mat4 q = Mat4::Zero();
};

/// The two square-pixel identities of a dual conic, normalized by its squared
/// Frobenius norm.
std::pair<double, double> diac_square_pixel_residual(const Conic& omega_star);

}  // namespace slcv
