#include "aopnpl/so3.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "aopnpl/error.hpp"

namespace aopnpl {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotSkewSymmetric: return "NotSkewSymmetric";
    case ErrorCode::kNearPiRotation: return "NearPiRotation";
    case ErrorCode::kDegenerateLine: return "DegenerateLine";
    case ErrorCode::kSingularIntrinsics: return "SingularIntrinsics";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kDegenerateProjectedLine: return "DegenerateProjectedLine";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInsufficientCorrespondences: return "InsufficientCorrespondences";
    case ErrorCode::kIllConditionedGram: return "IllConditionedGram";
    case ErrorCode::kRepeatedSmallestEigenvalue: return "RepeatedSmallestEigenvalue";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kUnderdetermined: return "Underdetermined";
    case ErrorCode::kSingularNormalEquations: return "SingularNormalEquations";
    case ErrorCode::kRankDeficientConstraints: return "RankDeficientConstraints";
    case ErrorCode::kSingularProjectedFisher: return "SingularProjectedFisher";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Mat3 Hat(const Vec3& s) {
  Mat3 m;
  m << 0.0, -s.z(), s.y(),
       s.z(), 0.0, -s.x(),
       -s.y(), s.x(), 0.0;
  return m;
}

Vec3 Vee(const Mat3& m) {
  const double asym = (m + m.transpose()).norm();
  if (asym > 1e-6 * m.norm()) {
    throw Error(ErrorCode::kNotSkewSymmetric,
                "vee: matrix is not skew-symmetric (||M+M^T||_F = " +
                    std::to_string(asym) + ")");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Mat3 ExpSO3(const Vec3& s) {
  const double theta2 = s.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 w = Hat(s);
  double a;  // sin(x)/x
  double b;  // (1-cos(x))/x^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + a * w + b * w * w;
}

Vec3 LogSO3(const Mat3& r) {
  // atan2 keeps full precision for small angles where acos does not.
  const Vec3 axis_sin(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double sin_phi = 0.5 * axis_sin.norm();
  const double cos_phi = 0.5 * (r.trace() - 1.0);
  const double phi = std::atan2(sin_phi, cos_phi);
  if (std::numbers::pi - phi < kNearPiTolerance) {
    throw Error(ErrorCode::kNearPiRotation,
                "log: rotation angle is within 1e-6 of pi");
  }
  double factor;  // phi / (2 sin phi)
  if (phi < kSmallAngle) {
    factor = 0.5 * (1.0 + phi * phi / 6.0);
  } else {
    factor = phi / (2.0 * std::sin(phi));
  }
  return factor * axis_sin;
}

Mat3 Retract(const Mat3& r, const Vec3& s) { return r * ExpSO3(s); }

bool IsRotation(const Mat3& m, double tol) {
  return (m.transpose() * m - Mat3::Identity()).norm() <= tol &&
         std::abs(m.determinant() - 1.0) <= tol;
}

PluckerLine PluckerFromEndpoints(const Vec3& p, const Vec3& q) {
  if ((p - q).norm() <= 1e-9) {
    throw Error(ErrorCode::kDegenerateLine, "line endpoints coincide");
  }
  return PluckerLine{p.cross(q), q - p};
}

std::pair<Vec3, Vec3> NormalizeLineEndpoints(const Vec3& p, const Vec3& q) {
  const Vec3 d = q - p;
  const double len = d.norm();
  if (len <= 1e-9) {
    throw Error(ErrorCode::kDegenerateLine, "line endpoints coincide");
  }
  const Vec3 mid = 0.5 * (p + q);
  const Vec3 half = (0.5 * std::sqrt(3.0) / len) * d;
  return {mid - half, mid + half};
}

Mat3 RotationFromEuler(const Vec3& angles) {
  const Eigen::AngleAxisd rx(angles.x(), Vec3::UnitX());
  const Eigen::AngleAxisd ry(angles.y(), Vec3::UnitY());
  const Eigen::AngleAxisd rz(angles.z(), Vec3::UnitZ());
  return (rz * ry * rx).toRotationMatrix();
}

}  // namespace aopnpl
