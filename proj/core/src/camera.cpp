#include "aopnpl/camera.hpp"

#include <Eigen/LU>
#include <cmath>
#include <string>
#include <tuple>

#include "aopnpl/error.hpp"

namespace aopnpl {

CameraIntrinsics::CameraIntrinsics(const Mat3& k) : k_(k) {
  if (!(k(0, 0) > 0.0) || !(k(1, 1) > 0.0)) {
    throw Error(ErrorCode::kSingularIntrinsics, "focal lengths must be positive");
  }
  if (k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0 || k(2, 2) != 1.0) {
    throw Error(ErrorCode::kSingularIntrinsics,
                "intrinsics must be upper triangular with K[2][2] = 1");
  }
  // Upper triangular with positive diagonal, hence invertible.
  k_inv_ = k_.inverse();
}

CameraIntrinsics CameraIntrinsics::FromFocal(double focal, double cx, double cy) {
  Mat3 k;
  k << focal, 0.0, cx, 0.0, focal, cy, 0.0, 0.0, 1.0;
  return CameraIntrinsics(k);
}

Vec2 CameraIntrinsics::Normalize(const Vec2& x_px) const {
  return (k_inv_ * Homogeneous(x_px)).head<2>();
}

Vec2 CameraIntrinsics::ToPixel(const Vec2& x) const {
  return (k_ * Homogeneous(x)).head<2>();
}

LineCorrespondence LineCorrespondence::Make(const Vec3& p, const Vec3& q,
                                            const Vec2& image_p, const Vec2& image_q,
                                            bool normalize) {
  if ((image_p - image_q).norm() <= 1e-9) {
    throw Error(ErrorCode::kDegenerateLine, "image line endpoints coincide");
  }
  LineCorrespondence c;
  if (normalize) {
    std::tie(c.endpoint_p, c.endpoint_q) = NormalizeLineEndpoints(p, q);
  } else {
    c.endpoint_p = p;
    c.endpoint_q = q;
  }
  c.world = PluckerFromEndpoints(c.endpoint_p, c.endpoint_q);
  c.image_p = image_p;
  c.image_q = image_q;
  return c;
}

Vec3 Homogeneous(const Vec2& x) { return Vec3(x.x(), x.y(), 1.0); }

Vec2 NormalizePixel(const CameraIntrinsics& k, const Vec2& x_px) {
  return k.Normalize(x_px);
}

Vec2 ProjectPoint(const Pose& pose, const Vec3& x) {
  const Vec3 xc = pose.rotation * x + pose.translation;
  if (xc.z() <= kDepthEps) {
    throw Error(ErrorCode::kBehindCamera,
                "point depth " + std::to_string(xc.z()) + " is not in front of the camera");
  }
  return xc.head<2>() / xc.z();
}

Vec3 ProjectLine(const Pose& pose, const PluckerLine& line) {
  const Vec3 rd = pose.rotation * line.direction;
  return pose.rotation * line.moment + pose.translation.cross(rd);
}

Vec2 PointResidual(const Pose& pose, const PointCorrespondence& c) {
  return c.image - ProjectPoint(pose, c.world);
}

Vec2 LineResidual(const Pose& pose, const LineCorrespondence& c) {
  const Vec3 l = ProjectLine(pose, c.world);
  return Vec2(Homogeneous(c.image_p).dot(l), Homogeneous(c.image_q).dot(l));
}

double LineWeightVariance(const Pose& pose, const PluckerLine& line, double sigma2) {
  if (sigma2 < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "sigma2 must be non-negative");
  }
  const Vec3 l = ProjectLine(pose, line);
  const double n2 = l.head<2>().squaredNorm();
  if (std::sqrt(n2) <= 1e-12) {
    throw Error(ErrorCode::kDegenerateProjectedLine,
                "projected line passes through the optical centre");
  }
  return sigma2 * n2;
}

double MlObjective(const Pose& pose, std::span<const PointCorrespondence> points,
                   std::span<const LineCorrespondence> lines, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma2 must be positive");
  }
  const std::size_t total = points.size() + lines.size();
  if (total == 0) {
    throw Error(ErrorCode::kEmptyInput, "no correspondences");
  }
  double sum = 0.0;
  for (const auto& c : points) {
    sum += PointResidual(pose, c).squaredNorm() / sigma2;
  }
  for (const auto& c : lines) {
    sum += LineResidual(pose, c).squaredNorm() / LineWeightVariance(pose, c.world, sigma2);
  }
  return sum / static_cast<double>(total);
}

}  // namespace aopnpl
