#include "slcv/io.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace slcv {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { fail(Errc::InvalidInput, what); }

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j, const char* what) {
  if (j.is_number()) return cd(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cd(j[0].get<double>(), j[1].get<double>());
  bad(std::string(what) + ": expected a number or an [re, im] pair");
}

template <typename Mat>
json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

/// Reads a fixed-size real matrix given as nested rows or as a flat row-major
/// array.
template <typename Mat>
Mat matrix_from_json(const json& j, const char* what) {
  Mat m;
  const Eigen::Index rows = m.rows(), cols = m.cols();
  if (!j.is_array()) bad(std::string(what) + ": expected an array");
  if (j.size() == static_cast<std::size_t>(rows * cols)) {
    for (Eigen::Index i = 0; i < rows * cols; ++i) {
      if (!j[i].is_number()) bad(std::string(what) + ": expected numbers");
      m(i / cols, i % cols) = j[i].get<double>();
    }
    return m;
  }
  if (j.size() != static_cast<std::size_t>(rows)) bad(std::string(what) + ": wrong row count");
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != static_cast<std::size_t>(cols))
      bad(std::string(what) + ": wrong column count");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) bad(std::string(what) + ": expected numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

template <typename Vec>
json vector_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

template <typename Vec>
Vec vector_from_json(const json& j, const char* what) {
  Vec v;
  if (!j.is_array() || j.size() != static_cast<std::size_t>(v.size()))
    bad(std::string(what) + ": wrong vector length");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) bad(std::string(what) + ": expected numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

json cvector_to_json(const Vec4c& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < 4; ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

Vec4c cvector_from_json(const json& j, const char* what) {
  Vec4c v;
  if (!j.is_array() || j.size() != 4) bad(std::string(what) + ": wrong vector length");
  for (Eigen::Index i = 0; i < 4; ++i) v(i) = complex_from_json(j[i], what);
  return v;
}

/// NaN and infinities are not JSON values; encode them as null.
json finite_or_null(double v) {
  if (std::isfinite(v)) return json(v);
  return json();
}

double number_or_nan(const json& j, const char* what) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) bad(std::string(what) + ": expected a number or null");
  return j.get<double>();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::InvalidInput, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::InvalidInput, "cannot open file for writing: " + path);
  out << text;
  if (!out) fail(Errc::InvalidInput, "write failed: " + path);
}

json truth_to_json(const GroundTruth& truth) {
  json cams = json::array();
  for (const MetricCamera& cam : truth.cameras) {
    json c;
    c["K"] = matrix_to_json(cam.k);
    c["R"] = matrix_to_json(cam.r);
    c["C"] = vector_to_json(cam.c);
    cams.push_back(c);
  }
  json pts = json::array();
  for (const Vec4& x : truth.points) pts.push_back(vector_to_json(x));
  json trips = json::array();
  for (const std::array<int, 3>& t : truth.triplets) trips.push_back(json::array({t[0], t[1], t[2]}));
  json out;
  out["cameras"] = cams;
  out["points"] = pts;
  out["triplets"] = trips;
  out["plane"] = vector_to_json(truth.plane);
  out["H"] = matrix_to_json(truth.h);
  return out;
}

GroundTruth truth_from_json(const json& j) {
  GroundTruth truth;
  if (!j.contains("cameras") || !j["cameras"].is_array()) bad("ground_truth.cameras missing");
  for (const json& c : j["cameras"]) {
    MetricCamera cam;
    cam.k = matrix_from_json<Mat3>(c.at("K"), "ground_truth K");
    cam.r = matrix_from_json<Mat3>(c.at("R"), "ground_truth R");
    cam.c = vector_from_json<Vec3>(c.at("C"), "ground_truth C");
    truth.cameras.push_back(cam);
  }
  if (j.contains("points"))
    for (const json& p : j["points"])
      truth.points.push_back(vector_from_json<Vec4>(p, "ground_truth point"));
  if (j.contains("triplets"))
    for (const json& t : j["triplets"]) {
      if (!t.is_array() || t.size() != 3) bad("ground_truth triplet: expected three indices");
      truth.triplets.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
  truth.plane = vector_from_json<Vec4>(j.at("plane"), "ground_truth plane");
  truth.h = matrix_from_json<Mat4>(j.at("H"), "ground_truth H");
  return truth;
}

const char* format_double(char (&buf)[64], double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

namespace {

SceneFile parse_scene_doc(const json& doc) {
  if (!doc.is_object() || !doc.contains("cameras") || !doc["cameras"].is_array() ||
      doc["cameras"].empty())
    bad("scene file needs a nonempty cameras array");

  SceneFile file;
  for (const json& c : doc["cameras"]) {
    if (!c.is_object() || !c.contains("P")) bad("camera entry needs a P matrix");
    ProjectionMatrix cam;
    cam.p = matrix_from_json<Mat34>(c["P"], "camera P");
    cam.width = c.contains("width") ? c["width"].get<double>() : 0.0;
    cam.height = c.contains("height") ? c["height"].get<double>() : 0.0;
    if (!(cam.width > 0.0) || !(cam.height > 0.0))
      bad("camera entry needs positive width and height");
    const Eigen::JacobiSVD<Mat34> svd(cam.p);
    if (!(svd.singularValues()(2) > 1e-12 * svd.singularValues()(0)))
      bad("camera P must have rank 3");
    file.recon.cameras.push_back(cam);
  }
  if (doc.contains("points")) {
    if (!doc["points"].is_array()) bad("points must be an array");
    for (const json& p : doc["points"])
      file.recon.points.push_back(vector_from_json<Vec4>(p, "point"));
  }
  if (doc.contains("observations")) {
    if (!doc["observations"].is_array()) bad("observations must be an array");
    for (const json& o : doc["observations"]) {
      Observation ob;
      ob.camera = o.at("camera").get<int>();
      ob.point = o.at("point").get<int>();
      ob.u = o.at("u").get<double>();
      ob.v = o.at("v").get<double>();
      if (ob.camera < 0 || ob.camera >= static_cast<int>(file.recon.cameras.size()))
        bad("observation references a camera that does not exist");
      if (ob.point < 0 || ob.point >= static_cast<int>(file.recon.points.size()))
        bad("observation references a point that does not exist");
      file.recon.observations.push_back(ob);
    }
  }
  if (doc.contains("triplets")) {
    if (!doc["triplets"].is_array()) bad("triplets must be an array");
    for (const json& t : doc["triplets"]) {
      if (!t.is_array() || t.size() != 3) bad("triplet: expected three point indices");
      std::array<int, 3> tr{t[0].get<int>(), t[1].get<int>(), t[2].get<int>()};
      for (int idx : tr)
        if (idx < 0 || idx >= static_cast<int>(file.recon.points.size()))
          bad("triplet references a point that does not exist");
      file.recon.triplets.push_back(tr);
    }
  }
  if (doc.contains("ground_truth")) file.truth = truth_from_json(doc["ground_truth"]);
  return file;
}

}  // namespace

SceneFile parse_scene(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  try {
    return parse_scene_doc(doc);
  } catch (const json::exception& e) {
    bad(std::string("invalid scene document: ") + e.what());
  }
}

SceneFile read_scene(const std::string& path) { return parse_scene(read_file(path)); }

std::string serialize_scene(const ProjectiveReconstruction& recon, const GroundTruth* truth) {
  json doc;
  json cams = json::array();
  for (const ProjectionMatrix& cam : recon.cameras) {
    json c;
    c["P"] = matrix_to_json(cam.p);
    c["width"] = cam.width;
    c["height"] = cam.height;
    cams.push_back(c);
  }
  doc["cameras"] = cams;
  if (!recon.points.empty()) {
    json pts = json::array();
    for (const Vec4& x : recon.points) pts.push_back(vector_to_json(x));
    doc["points"] = pts;
  }
  if (!recon.observations.empty()) {
    json obs = json::array();
    for (const Observation& ob : recon.observations) {
      json o;
      o["camera"] = ob.camera;
      o["point"] = ob.point;
      o["u"] = ob.u;
      o["v"] = ob.v;
      obs.push_back(o);
    }
    doc["observations"] = obs;
  }
  if (!recon.triplets.empty()) {
    json trips = json::array();
    for (const std::array<int, 3>& t : recon.triplets)
      trips.push_back(json::array({t[0], t[1], t[2]}));
    doc["triplets"] = trips;
  }
  if (truth != nullptr) doc["ground_truth"] = truth_to_json(*truth);
  return doc.dump(2) + "\n";
}

void write_scene(const std::string& path, const ProjectiveReconstruction& recon,
                 const GroundTruth* truth) {
  write_file(path, serialize_scene(recon, truth));
}

namespace {

ResultFile parse_result_doc(const json& doc) {
  if (!doc.is_object()) bad("result file must be a JSON object");

  ResultFile file;
  UpgradeResult& res = file.result;
  res.h = matrix_from_json<Mat4>(doc.at("H"), "H");
  res.plane = cvector_from_json(doc.at("plane"), "plane");
  if (!doc.contains("cameras") || !doc["cameras"].is_array()) bad("result needs a cameras array");
  for (const json& c : doc["cameras"]) {
    MetricCamera cam;
    cam.k = matrix_from_json<Mat3>(c.at("K"), "camera K");
    cam.r = matrix_from_json<Mat3>(c.at("R"), "camera R");
    cam.c = vector_from_json<Vec3>(c.at("C"), "camera C");
    res.cameras.push_back(cam);
  }
  if (doc.contains("metrics")) {
    const json& m = doc["metrics"];
    if (m.contains("rms")) res.reprojection_rms = number_or_nan(m["rms"], "metrics.rms");
    if (m.contains("sigma_mu")) file.sigma_mu = number_or_nan(m["sigma_mu"], "metrics.sigma_mu");
  }
  if (doc.contains("search")) {
    const json& s = doc["search"];
    if (s.contains("z0")) res.diagnostics.z0 = complex_from_json(s["z0"], "search.z0");
    if (s.contains("z1")) res.diagnostics.z1 = complex_from_json(s["z1"], "search.z1");
    if (s.contains("grid") && s["grid"].is_array() && s["grid"].size() == 2) {
      file.grid.n = s["grid"][0].get<int>();
      file.grid.m = s["grid"][1].get<int>();
    }
    if (s.contains("cost")) res.diagnostics.final_cost = number_or_nan(s["cost"], "search.cost");
    if (s.contains("grid_cost"))
      res.diagnostics.grid_cost = number_or_nan(s["grid_cost"], "search.grid_cost");
    if (s.contains("method") && s["method"].is_string())
      res.diagnostics.method = s["method"].get<std::string>();
    if (s.contains("converged") && s["converged"].is_boolean())
      res.diagnostics.converged = s["converged"].get<bool>();
    if (s.contains("triple") && s["triple"].is_array() && s["triple"].size() == 3)
      res.diagnostics.triple = {s["triple"][0].get<int>(), s["triple"][1].get<int>(),
                                s["triple"][2].get<int>()};
  }
  return file;
}

}  // namespace

ResultFile parse_result(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  try {
    return parse_result_doc(doc);
  } catch (const json::exception& e) {
    bad(std::string("invalid result document: ") + e.what());
  }
}

ResultFile read_result(const std::string& path) { return parse_result(read_file(path)); }

std::string serialize_result(const ResultFile& file) {
  const UpgradeResult& res = file.result;
  json doc;
  doc["H"] = matrix_to_json(res.h);
  doc["plane"] = cvector_to_json(res.plane);

  json cams = json::array();
  const std::vector<CameraCost>* costs = nullptr;
  if (res.diagnostics.breakdown &&
      res.diagnostics.breakdown->cameras.size() == res.cameras.size())
    costs = &res.diagnostics.breakdown->cameras;
  for (std::size_t i = 0; i < res.cameras.size(); ++i) {
    json c;
    c["K"] = matrix_to_json(res.cameras[i].k);
    c["R"] = matrix_to_json(res.cameras[i].r);
    c["C"] = vector_to_json(res.cameras[i].c);
    if (costs != nullptr) {
      const CameraCost& cc = (*costs)[i];
      json cost;
      cost["c1"] = finite_or_null(cc.c1);
      cost["c2"] = finite_or_null(cc.c2);
      cost["c3"] = finite_or_null(cc.c3);
      cost["c4"] = finite_or_null(cc.c4);
      cost["weighted"] = finite_or_null(cc.weighted);
      c["cost"] = cost;
    }
    cams.push_back(c);
  }
  doc["cameras"] = cams;

  json metrics;
  metrics["rms"] = finite_or_null(res.reprojection_rms);
  metrics["sigma_mu"] = finite_or_null(file.sigma_mu);
  doc["metrics"] = metrics;

  json search;
  search["method"] = res.diagnostics.method;
  search["z0"] = complex_to_json(res.diagnostics.z0);
  search["z1"] = complex_to_json(res.diagnostics.z1);
  search["grid"] = json::array({file.grid.n, file.grid.m});
  search["grid_cost"] = finite_or_null(res.diagnostics.grid_cost);
  search["cost"] = finite_or_null(res.diagnostics.final_cost);
  search["converged"] = res.diagnostics.converged;
  search["triple"] = json::array(
      {res.diagnostics.triple[0], res.diagnostics.triple[1], res.diagnostics.triple[2]});
  if (!res.diagnostics.warnings.empty()) search["warnings"] = res.diagnostics.warnings;
  doc["search"] = search;
  return doc.dump(2) + "\n";
}

void write_result(const std::string& path, const ResultFile& file) {
  write_file(path, serialize_result(file));
}

void write_cost_surface_csv(std::ostream& os, const GridSpec& spec, const GridResult& grid) {
  const std::size_t expected =
      1 + static_cast<std::size_t>(spec.n) * spec.m + static_cast<std::size_t>(spec.n - 1) * spec.m;
  if (grid.zs.size() != expected || grid.samples.size() != expected)
    fail(Errc::Mismatch, "grid result does not match the given grid spec");

  os << "j,k,re_z,im_z,disk_flag,cost,cost_chi1,cost_chi2\n";
  char buf[64];
  std::size_t idx = 0;
  auto row = [&](int j, int k, int disk) {
    const cd z = grid.zs[idx];
    const GridSample& s = grid.samples[idx];
    os << j << ',' << k << ',';
    os << format_double(buf, z.real()) << ',';
    os << format_double(buf, z.imag()) << ',';
    os << disk << ',';
    os << format_double(buf, s.cost) << ',';
    os << format_double(buf, s.cost_chi1) << ',';
    os << format_double(buf, s.cost_chi2) << '\n';
    ++idx;
  };
  row(0, 0, 1);
  for (int j = 1; j <= spec.n; ++j)
    for (int k = 1; k <= spec.m; ++k) row(j, k, 1);
  for (int j = 1; j <= spec.n - 1; ++j)
    for (int k = 1; k <= spec.m; ++k) row(j, k, 0);
}

}  // namespace slcv
