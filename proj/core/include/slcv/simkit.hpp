#pragma once

#include "slcv/search.hpp"

#include <cstdint>
#include <vector>

namespace slcv {

/// Recipe for a synthetic multi-camera scene with optional rigid bars.
struct SceneSpec {
  int n_cameras = 6;
  Vec2 focal_range = Vec2(900.0, 1800.0);       ///< pixels, uniform draw per camera
  Vec2 pp_offset_range = Vec2(0.0, 0.0);        ///< per-axis |offset| from image center, pixels
  double image_width = 1280.0;
  double image_height = 960.0;
  int n_points = 60;
  int n_bar_triplets = 0;       ///< rigid three-point bars (end, exact midpoint, end)
  double bar_length = 0.6;      ///< scene units, end to end
  double noise_sigma = 0.0;     ///< isotropic Gaussian pixel noise on observations
  std::uint64_t seed = 1;
};

/// Everything the generator knows and the calibrators must not see.
struct GroundTruth {
  std::vector<MetricCamera> cameras;
  std::vector<Vec4> points;                  ///< metric, last coordinate 1
  std::vector<std::array<int, 3>> triplets;  ///< indices (end, midpoint, end)
  Vec4 plane;                                ///< plane at infinity in the scrambled frame
  Mat4 h;                                    ///< scramble: recon = h applied to the metric frame
};

/// A scrambled reconstruction plus the truth it came from.
struct Scene {
  GroundTruth truth;
  ProjectiveReconstruction recon;
};

/// Generates cameras on a jittered sphere looking at a bounded cloud, projects,
/// adds pixel noise, and hands the result out in a seeded random projective
/// frame. Deterministic per seed.
Scene make_scene(const SceneSpec& spec);

/// Calibration quality relative to ground truth.
struct ScoreReport {
  std::vector<double> focal_rel_err;  ///< |recovered alpha - true alpha| / true alpha
  std::vector<double> pp_err_px;      ///< principal-point distance in pixels
  std::vector<double> skew_rel;       ///< |k12| / k11
  std::vector<double> aspect_err;     ///< |k22 / k11 - 1|
  double max_focal_rel_err = 0.0;
  double max_pp_err_px = 0.0;
  double plane_angular_err = 0.0;
  double sigma_mu = 0.0;              ///< bar-length spread ratio; NaN without bars
  double reprojection_rms = 0.0;      ///< NaN without observations
};

/// Scores a result against the truth. When the reconstruction that produced
/// the result is supplied, bar statistics and RMS use its (noisy) points;
/// otherwise the exact scrambled truth stands in.
ScoreReport score(const UpgradeResult& result, const GroundTruth& truth,
                  const ProjectiveReconstruction* recon = nullptr);

}  // namespace slcv
