#pragma once

#include "slcv/simkit.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace slcv {

/// Parsed scene document: a reconstruction plus, when the file carries the
/// generator's ground-truth block, everything needed to score against it.
struct SceneFile {
  ProjectiveReconstruction recon;
  std::optional<GroundTruth> truth;
};

/// Calibration result document.
struct ResultFile {
  UpgradeResult result;
  GridSpec grid;
  double sigma_mu = std::numeric_limits<double>::quiet_NaN();
};

SceneFile parse_scene(const std::string& json_text);
SceneFile read_scene(const std::string& path);
std::string serialize_scene(const ProjectiveReconstruction& recon,
                            const GroundTruth* truth = nullptr);
void write_scene(const std::string& path, const ProjectiveReconstruction& recon,
                 const GroundTruth* truth = nullptr);

ResultFile parse_result(const std::string& json_text);
ResultFile read_result(const std::string& path);
std::string serialize_result(const ResultFile& file);
void write_result(const std::string& path, const ResultFile& file);

/// One CSV row per grid sample, header included, deterministic order and
/// formatting; infinities serialize as `inf`.
void write_cost_surface_csv(std::ostream& os, const GridSpec& spec, const GridResult& grid);

}  // namespace slcv
