#pragma once

#include <utility>

#include "aopnpl/types.hpp"

namespace aopnpl {

/// Rigid transform taking world coordinates to camera coordinates:
/// X_cam = rotation * X_world + translation.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

/// Plücker coordinates of a 3D line through P and Q:
/// moment = P x Q, direction = Q - P.
struct PluckerLine {
  Vec3 moment = Vec3::Zero();
  Vec3 direction = Vec3::Zero();

  Vec6 stacked() const {
    Vec6 l;
    l << moment, direction;
    return l;
  }
};

// Thresholds for the closed-form branches of exp/log.
inline constexpr double kSmallAngle = 1e-4;
inline constexpr double kNearPiTolerance = 1e-6;

Mat3 Hat(const Vec3& s);

/// Inverse of Hat. Throws NotSkewSymmetric when
/// ||M + M^T||_F > 1e-6 ||M||_F.
Vec3 Vee(const Mat3& m);

/// Rodrigues' formula, with a second-order Taylor branch below kSmallAngle.
Mat3 ExpSO3(const Vec3& s);

/// Principal logarithm. Returns zero at the identity and throws
/// NearPiRotation when the angle is within kNearPiTolerance of pi.
Vec3 LogSO3(const Mat3& r);

/// R * exp(s^).
Mat3 Retract(const Mat3& r, const Vec3& s);

/// True when m is orthonormal with det +1 (both within tol).
bool IsRotation(const Mat3& m, double tol = 1e-9);

PluckerLine PluckerFromEndpoints(const Vec3& p, const Vec3& q);

/// Slides the endpoints along their line so that they are sqrt(3) apart,
/// keeping the midpoint fixed.
std::pair<Vec3, Vec3> NormalizeLineEndpoints(const Vec3& p, const Vec3& q);

/// Rz(yaw) * Ry(pitch) * Rx(roll) for angles (roll, pitch, yaw).
Mat3 RotationFromEuler(const Vec3& angles);

}  // namespace aopnpl
