#pragma once

#include <span>
#include <vector>

#include "aopnpl/so3.hpp"
#include "aopnpl/types.hpp"

namespace aopnpl {

inline constexpr double kDepthEps = 1e-9;

/// Pinhole intrinsics (pixels). Validated on construction.
class CameraIntrinsics {
 public:
  explicit CameraIntrinsics(const Mat3& k);

  /// fx = fy = focal, principal point (cx, cy), zero skew.
  static CameraIntrinsics FromFocal(double focal, double cx, double cy);

  const Mat3& matrix() const { return k_; }
  double fx() const { return k_(0, 0); }
  double fy() const { return k_(1, 1); }

  /// First two rows of K^-1 [x_px; 1].
  Vec2 Normalize(const Vec2& x_px) const;
  /// Inverse of Normalize.
  Vec2 ToPixel(const Vec2& x) const;

 private:
  Mat3 k_;
  Mat3 k_inv_;
};

struct PointCorrespondence {
  Vec3 world;  // X_i
  Vec2 image;  // x_i, normalized image coordinates
};

struct LineCorrespondence {
  PluckerLine world;  // L_j, built from endpoints3d
  Vec3 endpoint_p;    // P_j
  Vec3 endpoint_q;    // Q_j
  Vec2 image_p;       // p_j, normalized
  Vec2 image_q;       // q_j, normalized

  /// Builds L_j from (P, Q). With normalize = true, P and Q are first moved
  /// to sqrt(3) separation about their midpoint.
  static LineCorrespondence Make(const Vec3& p, const Vec3& q, const Vec2& image_p,
                                 const Vec2& image_q, bool normalize = true);
};

/// Isotropic 2D measurement noise, sigma2 in squared normalized units.
struct NoiseModel {
  double sigma2 = 0.0;

  static NoiseModel FromPixels(double sigma_px, const CameraIntrinsics& k) {
    const double s = sigma_px / k.fx();
    return NoiseModel{s * s};
  }
};

Vec3 Homogeneous(const Vec2& x);

Vec2 NormalizePixel(const CameraIntrinsics& k, const Vec2& x_px);

/// E(RX+t) / e3^T(RX+t). Throws BehindCamera if the depth is <= kDepthEps.
Vec2 ProjectPoint(const Pose& pose, const Vec3& x);

/// Unnormalized image line [R  t^R] L.
Vec3 ProjectLine(const Pose& pose, const PluckerLine& line);

Vec2 PointResidual(const Pose& pose, const PointCorrespondence& c);

/// [p^h q^h]^T [R  t^R] L.
Vec2 LineResidual(const Pose& pose, const LineCorrespondence& c);

/// sigma2 * ||[l]_{1:2}||^2, the variance of a line residual entry.
double LineWeightVariance(const Pose& pose, const PluckerLine& line, double sigma2);

/// Normalized negative log-likelihood (up to constants) with the line
/// weights evaluated at `pose`.
double MlObjective(const Pose& pose, std::span<const PointCorrespondence> points,
                   std::span<const LineCorrespondence> lines, double sigma2);

}  // namespace aopnpl
