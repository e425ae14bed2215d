#pragma once

#include "slcv/cost.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace slcv {

/// Euclidean camera: intrinsics (upper triangular, k33 = 1), rotation, center.
struct MetricCamera {
  Mat3 k;
  Mat3 r;
  Vec3 c;
};

/// How a result was obtained, for reporting and diagnosis.
struct UpgradeDiagnostics {
  std::string method;
  cd z0 = 0.0;
  cd z1 = 0.0;
  double grid_cost = 0.0;
  double final_cost = 0.0;
  bool converged = true;
  std::array<int, 3> triple = {0, 1, 2};
  std::vector<std::string> warnings;
  std::optional<CostBreakdown> breakdown;
};

/// A Euclidean upgrading: homography, per-camera decompositions, the chosen
/// plane in the input projective frame, and quality metrics.
struct UpgradeResult {
  Mat4 h = Mat4::Identity();
  std::vector<MetricCamera> cameras;
  Vec4c plane = Vec4c::Zero();
  IAC iac1;
  double reprojection_rms = std::numeric_limits<double>::quiet_NaN();
  UpgradeDiagnostics diagnostics;
};

/// Homography sending the given plane to (0,0,0,1) whose upgraded first camera
/// has the intrinsics encoded by omega1.
Mat4 homography_from_plane_iac(const Vec4c& pi, const IAC& omega1, const ProjectionMatrix& p1);

/// Splits a finite camera into intrinsics, rotation, and center.
MetricCamera decompose_camera(const ProjectionMatrix& p);

/// Root-mean-square pixel distance between observations and reprojections.
double reprojection_rms(const ProjectiveReconstruction& recon);

/// Same, after applying the upgrading homography to cameras and points.
double reprojection_rms(const ProjectiveReconstruction& recon, const Mat4& h);

/// Spread statistics of upgraded end-to-end segment lengths.
struct SegmentStats {
  double sigma = 0.0;
  double mu = 0.0;
  double ratio = 0.0;
};

SegmentStats segment_length_stats(const std::vector<Vec4>& points,
                                  const std::vector<std::array<int, 3>>& triplets, const Mat4& h);

}  // namespace slcv
