#include "correspondence_file.hpp"

#include <fstream>

namespace aopnpl::io {
namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

template <int N>
Eigen::Matrix<double, N, 1> ReadVec(const json& j, const char* key) {
  if (!j.contains(key)) Bad(std::string("missing field '") + key + "'");
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != static_cast<std::size_t>(N)) {
    Bad(std::string("field '") + key + "' must be an array of " + std::to_string(N) +
        " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!a[i].is_number()) Bad(std::string("field '") + key + "' has a non-numeric entry");
    v(i) = a[i].get<double>();
  }
  if (!v.allFinite()) Bad(std::string("field '") + key + "' is not finite");
  return v;
}

Mat3 ReadMat3(const json& j, const char* key) {
  if (!j.contains(key)) Bad(std::string("missing field '") + key + "'");
  const json& a = j.at(key);
  Mat3 m;
  if (a.is_array() && a.size() == 3 && a[0].is_array()) {
    for (int r = 0; r < 3; ++r) {
      if (!a[r].is_array() || a[r].size() != 3) Bad(std::string(key) + " must be 3x3");
      for (int c = 0; c < 3; ++c) {
        if (!a[r][c].is_number()) Bad(std::string(key) + " has a non-numeric entry");
        m(r, c) = a[r][c].get<double>();
      }
    }
  } else if (a.is_array() && a.size() == 9) {
    for (int i = 0; i < 9; ++i) {
      if (!a[i].is_number()) Bad(std::string(key) + " has a non-numeric entry");
      m(i / 3, i % 3) = a[i].get<double>();
    }
  } else {
    Bad(std::string(key) + " must be a 3x3 array (row-major)");
  }
  if (!m.allFinite()) Bad(std::string(key) + " is not finite");
  return m;
}

json Arr(const Eigen::Ref<const VecX>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

json MatrixToJson(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) a.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return a;
}

json PoseToJson(const Pose& pose) {
  return {{"rotation", MatrixToJson(pose.rotation)},
          {"translation", Arr(pose.translation)}};
}

Pose PoseFromJson(const json& j) {
  if (!j.is_object()) Bad("pose must be an object with rotation and translation");
  Pose p{ReadMat3(j, "rotation"), ReadVec<3>(j, "translation")};
  if (!IsRotation(p.rotation, 1e-6)) Bad("pose rotation is not in SO(3)");
  return p;
}

CorrespondenceFile ParseCorrespondenceFile(const json& j) {
  if (!j.is_object()) Bad("top level must be an object");
  CorrespondenceFile f;
  f.intrinsics = CameraIntrinsics(ReadMat3(j, "intrinsics"));
  if (j.contains("points")) {
    const json& pts = j.at("points");
    if (!pts.is_array()) Bad("'points' must be an array");
    for (const json& p : pts) {
      f.points.push_back({ReadVec<3>(p, "X"), f.intrinsics.Normalize(ReadVec<2>(p, "x_px"))});
    }
  }
  if (j.contains("lines")) {
    const json& lines = j.at("lines");
    if (!lines.is_array()) Bad("'lines' must be an array");
    for (const json& l : lines) {
      f.lines.push_back(LineCorrespondence::Make(
          ReadVec<3>(l, "P"), ReadVec<3>(l, "Q"), f.intrinsics.Normalize(ReadVec<2>(l, "p_px")),
          f.intrinsics.Normalize(ReadVec<2>(l, "q_px"))));
    }
  }
  if (f.points.empty() && f.lines.empty()) {
    throw Error(ErrorCode::kEmptyInput, "file has no correspondences");
  }
  if (j.contains("ground_truth") && !j.at("ground_truth").is_null()) {
    f.ground_truth = PoseFromJson(j.at("ground_truth"));
  }
  return f;
}

CorrespondenceFile LoadCorrespondenceFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Bad("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    Bad("invalid JSON in '" + path + "': " + e.what());
  }
  return ParseCorrespondenceFile(j);
}

json ToJson(const CorrespondenceFile& f) {
  json j;
  j["intrinsics"] = MatrixToJson(f.intrinsics.matrix());
  j["points"] = json::array();
  for (const auto& p : f.points) {
    j["points"].push_back(
        {{"X", Arr(p.world)}, {"x_px", Arr(f.intrinsics.ToPixel(p.image))}});
  }
  j["lines"] = json::array();
  for (const auto& l : f.lines) {
    j["lines"].push_back({{"P", Arr(l.endpoint_p)},
                          {"Q", Arr(l.endpoint_q)},
                          {"p_px", Arr(f.intrinsics.ToPixel(l.image_p))},
                          {"q_px", Arr(f.intrinsics.ToPixel(l.image_q))}});
  }
  if (f.ground_truth) j["ground_truth"] = PoseToJson(*f.ground_truth);
  return j;
}

json SceneToJson(const Scene& scene, const CameraIntrinsics& k) {
  CorrespondenceFile f;
  f.intrinsics = k;
  f.points = scene.points;
  f.lines = scene.lines;
  f.ground_truth = scene.true_pose;
  return ToJson(f);
}

}  // namespace aopnpl::io
