#pragma once

#include "slcv/variety.hpp"

#include <optional>
#include <vector>

namespace slcv {

/// Candidate image of the absolute conic.
struct IAC {
  Conic omega;
  bool normalized = false;
};

/// Weights of the four compatibility terms.
struct CostWeights {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double gamma3 = 1.0;
  double gamma4 = 1.0;
};

/// One camera's term values and weighted sum; weighted is +inf when the IAC
/// construction failed for that camera.
struct CameraCost {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  double weighted = 0.0;
};

/// Term-by-term cost of one plane: c0 is the maximum weighted sum over cameras.
struct CostBreakdown {
  std::vector<CameraCost> cameras;
  double c0 = 0.0;
  Vec4c plane;
};

/// Immutable evaluation context shared by concurrent cost calls.
struct CostContext {
  CameraTriple triple;
  std::vector<ProjectionMatrix> cameras;  ///< all cameras, triple members included
  CostWeights weights;
  std::array<int, 3> triple_indices = {0, 1, 2};  ///< positions of the triple in cameras
};

/// Builds the context for a reconstruction; triple_indices selects the three
/// cameras that parameterize the search.
CostContext make_cost_context(const ProjectiveReconstruction& recon,
                              const CostWeights& weights = {},
                              const std::array<int, 3>& triple_indices = {0, 1, 2},
                              std::uint64_t seed = 0x51C5EEDULL);

/// Conic through the images of the six line/plane meets in the given camera.
IAC iac_from_plane(const Vec4c& chi, int camera_index, const CameraTriple& triple,
                   const std::vector<ProjectionMatrix>& cameras);

/// Unit-Frobenius rescaling by the unit phase that maximizes the Frobenius norm
/// of the real part.
IAC normalize_iac(const Conic& omega);

/// Penalizes essentially complex conics: 0 iff real and imaginary parts are
/// proportional.
double c1(const IAC& omega);

/// Penalizes indefiniteness of the real part via leading principal minors,
/// taking the better of the two signs.
double c2(const IAC& omega);

/// Penalizes deviation from unit aspect ratio and zero skew.
double c3(const IAC& omega);

/// Taxicab distance of the implied principal point to the image domain.
double c4(const IAC& omega, double image_width, double image_height);

/// Max over cameras of the weighted term sum for one plane; per-camera
/// failures enter as +inf.
CostBreakdown c0(const Vec4c& chi, const CostContext& context);

/// Cost of a parameter z: the better of its two candidate planes.
struct ZCost {
  double cost = 0.0;
  double cost_chi1 = 0.0;
  double cost_chi2 = 0.0;
  std::optional<CandidatePlanePair> pair;  ///< absent when the construction failed at z
  std::optional<CostBreakdown> best;       ///< breakdown of the cheaper plane
};

ZCost cost_z(cd z, const CostContext& context);

}  // namespace slcv
