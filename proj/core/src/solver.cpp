#include "aopnpl/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <string>

#include "aopnpl/error.hpp"

namespace aopnpl {
namespace {

// E R^T should be t^. Noisy inputs are only approximately skew, so the
// tolerance is looser than Vee's and the skew part is taken explicitly.
Vec3 TranslationFromEssential(const Mat3& e, const Mat3& r) {
  const Mat3 m = e * r.transpose();
  const double scale = m.norm();
  if ((m + m.transpose()).norm() > 0.1 * scale && scale > 0.0) {
    throw Error(ErrorCode::kNotSkewSymmetric,
                "E R^T is too far from skew-symmetric to extract a translation");
  }
  return Vee(0.5 * (m - m.transpose()));
}

void RequireMode(const ThetaVector& theta, DltMode mode) {
  if (theta.mode != mode || theta.v.size() != Dimension(mode)) {
    throw Error(ErrorCode::kInvalidArgument,
                "theta does not match the " + std::string(ModeName(mode)) + " layout");
  }
}

}  // namespace

MatX EliminateBias(const DltSystem& sys, double sigma2_hat) {
  return Symmetrize(sys.q - sigma2_hat * sys.q_tilde_sum);
}

MatX EliminateBias(const DltSystem& sys, double sigma2_point, double sigma2_line) {
  return Symmetrize(sys.q - sigma2_point * sys.q_tilde_point -
                    sigma2_line * sys.q_tilde_line);
}

std::pair<ThetaVector, RecoveryDiagnostics> SmallestUnitEigvec(const MatX& m,
                                                               DltMode mode) {
  const Eigen::SelfAdjointEigenSolver<MatX> eig(m);
  RecoveryDiagnostics diag;
  diag.smallest_eig = eig.eigenvalues()(0);
  diag.eig_gap = eig.eigenvalues()(1) - eig.eigenvalues()(0);
  if (diag.eig_gap < 1e-12 * m.norm()) {
    throw Error(ErrorCode::kRepeatedSmallestEigenvalue,
                "smallest eigenvalue is not simple; the instance is ill-posed");
  }
  VecX v = eig.eigenvectors().col(0);
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
  return {ThetaVector{v.normalized(), mode}, diag};
}

RotationRecovery RecoverRotation(const Vec9& theta9) {
  const Mat3 r1 = Eigen::Map<const Mat3>(theta9.data());
  const Eigen::JacobiSVD<Mat3> svd1(r1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd1.singularValues();
  if (!(sv(2) >= 1e-12 * sv(0)) || sv(0) == 0.0) {
    throw Error(ErrorCode::kRankDeficient, "rotation block is rank deficient");
  }
  RotationRecovery out;
  out.scale = sv.sum() / 3.0;
  const Mat3 r2 = r1 / out.scale;
  const Eigen::JacobiSVD<Mat3> svd2(r2, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 uv = svd2.matrixU() * svd2.matrixV().transpose();
  out.sign = uv.determinant() > 0.0 ? 1 : -1;
  out.rotation = out.sign * uv;
  return out;
}

Mat3 RecoverEssential(const Vec9& theta9) {
  const Mat3 e1 = Eigen::Map<const Mat3>(theta9.data());
  const Eigen::JacobiSVD<Mat3> svd(e1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double t = 0.5 * (svd.singularValues()(0) + svd.singularValues()(1));
  return svd.matrixU() * Vec3(t, t, 0.0).asDiagonal() * svd.matrixV().transpose();
}

std::pair<Pose, RecoveryDiagnostics> RecoverPosePoint(const ThetaVector& theta) {
  RequireMode(theta, DltMode::kPoint);
  const RotationRecovery rot = RecoverRotation(theta.v.head<9>());
  Pose pose;
  pose.rotation = rot.rotation;
  pose.translation = (rot.sign / rot.scale) * theta.v.segment<3>(9);
  RecoveryDiagnostics diag;
  diag.scale_s = rot.scale;
  diag.sign_d = rot.sign;
  return {pose, diag};
}

std::pair<Pose, RecoveryDiagnostics> RecoverPoseLine(const ThetaVector& theta) {
  RequireMode(theta, DltMode::kLine);
  const RotationRecovery rot = RecoverRotation(theta.v.head<9>());
  const VecX scaled = (rot.sign / rot.scale) * theta.v;
  const Mat3 e = RecoverEssential(scaled.segment<9>(9));
  Pose pose;
  pose.rotation = rot.rotation;
  pose.translation = TranslationFromEssential(e, rot.rotation);
  RecoveryDiagnostics diag;
  diag.scale_s = rot.scale;
  diag.sign_d = rot.sign;
  return {pose, diag};
}

std::pair<Pose, RecoveryDiagnostics> RecoverPoseCombined(const ThetaVector& theta) {
  RequireMode(theta, DltMode::kCombined);
  const RotationRecovery rot = RecoverRotation(theta.v.head<9>());
  const VecX scaled = (rot.sign / rot.scale) * theta.v;
  const Vec3 t_points = scaled.segment<3>(18);
  const Mat3 e = RecoverEssential(scaled.segment<9>(9));
  const Vec3 t_lines = TranslationFromEssential(e, rot.rotation);
  Pose pose;
  pose.rotation = rot.rotation;
  pose.translation = 0.5 * (t_points + t_lines);
  RecoveryDiagnostics diag;
  diag.scale_s = rot.scale;
  diag.sign_d = rot.sign;
  return {pose, diag};
}

std::pair<Pose, RecoveryDiagnostics> RecoverPose(const ThetaVector& theta) {
  switch (theta.mode) {
    case DltMode::kPoint: return RecoverPosePoint(theta);
    case DltMode::kLine: return RecoverPoseLine(theta);
    case DltMode::kCombined: return RecoverPoseCombined(theta);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mode");
}

std::optional<DltMode> SelectMode(int n_points, int n_lines) {
  if (n_points >= 2 && n_lines >= 5 && n_points + n_lines >= 11) {
    return DltMode::kCombined;
  }
  if (n_points >= 6 && n_lines < 5) return DltMode::kPoint;
  if (n_lines >= 9 && n_points < 2) return DltMode::kLine;
  return std::nullopt;
}

FirstStepResult ConsistentEstimate(std::span<const PointCorrespondence> points,
                                   std::span<const LineCorrespondence> lines,
                                   const EstimatorConfig& config) {
  const int n = static_cast<int>(points.size());
  const int m = static_cast<int>(lines.size());
  const std::optional<DltMode> mode = SelectMode(n, m);
  if (!mode) {
    throw Error(ErrorCode::kUnderdetermined,
                "the pose is underdetermined for n = " + std::to_string(n) +
                    ", m = " + std::to_string(m));
  }

  DltSystem sys;
  switch (*mode) {
    case DltMode::kPoint: sys = BuildPointSystem(points); break;
    case DltMode::kLine: sys = BuildLineSystem(lines); break;
    case DltMode::kCombined: sys = BuildCombinedSystem(points, lines); break;
  }

  FirstStepResult out;
  out.mode = *mode;
  if (config.sigma2_override) {
    if (*config.sigma2_override < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "sigma2 override must be non-negative");
    }
    out.variance.mode = *mode;
    out.variance.sigma2_hat = *config.sigma2_override;
    out.sigma2_point = out.sigma2_line = *config.sigma2_override;
  } else {
    out.variance = EstimateSigma2(sys);
    out.sigma2_point = out.sigma2_line = out.variance.sigma2_hat;
    if (config.split_variance && n >= 6 && m >= 9) {
      out.sigma2_point = EstimateSigma2(BuildPointSystem(points)).sigma2_hat;
      out.sigma2_line = EstimateSigma2(BuildLineSystem(lines)).sigma2_hat;
      out.split = true;
    }
  }

  MatX q_be;
  if (!config.bias_elimination) {
    q_be = sys.q;
  } else if (out.split) {
    q_be = EliminateBias(sys, out.sigma2_point, out.sigma2_line);
  } else {
    q_be = EliminateBias(sys, out.variance.sigma2_hat);
  }

  auto [theta, eig_diag] = SmallestUnitEigvec(q_be, *mode);
  auto [pose, diag] = RecoverPose(theta);
  diag.smallest_eig = eig_diag.smallest_eig;
  diag.eig_gap = eig_diag.eig_gap;
  out.theta = std::move(theta);
  out.pose = pose;
  out.recovery = diag;
  return out;
}

}  // namespace aopnpl
