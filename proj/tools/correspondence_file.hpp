#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "aopnpl/camera.hpp"
#include "aopnpl/synth.hpp"

namespace aopnpl::io {

/// Intrinsics plus pixel observations, already normalized on load.
struct CorrespondenceFile {
  CameraIntrinsics intrinsics = CameraIntrinsics::FromFocal(1.0, 0.0, 0.0);
  std::vector<PointCorrespondence> points;
  std::vector<LineCorrespondence> lines;
  std::optional<Pose> ground_truth;
};

/// Throws aopnpl::Error(kInvalidArgument) on malformed content.
CorrespondenceFile ParseCorrespondenceFile(const nlohmann::json& j);
CorrespondenceFile LoadCorrespondenceFile(const std::string& path);

/// Pixel observations are written back through the intrinsics.
nlohmann::json ToJson(const CorrespondenceFile& f);
nlohmann::json SceneToJson(const Scene& scene, const CameraIntrinsics& k);

nlohmann::json PoseToJson(const Pose& pose);
Pose PoseFromJson(const nlohmann::json& j);
nlohmann::json MatrixToJson(const Mat3& m);

}  // namespace aopnpl::io
