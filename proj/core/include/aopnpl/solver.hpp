#pragma once

#include <optional>
#include <span>
#include <utility>

#include "aopnpl/camera.hpp"
#include "aopnpl/dlt.hpp"
#include "aopnpl/variance.hpp"

namespace aopnpl {

struct ThetaVector {
  VecX v;
  DltMode mode = DltMode::kPoint;
};

struct RecoveryDiagnostics {
  double scale_s = 1.0;
  int sign_d = 1;
  double smallest_eig = 0.0;
  double eig_gap = 0.0;
};

struct RotationRecovery {
  Mat3 rotation;
  double scale = 1.0;  // mean singular value of the reshaped block
  int sign = 1;        // det(U V^T)
};

/// q - sigma2_hat * q_tilde_sum, symmetrized.
MatX EliminateBias(const DltSystem& sys, double sigma2_hat);

/// Separate variances for the point and endpoint noise templates.
MatX EliminateBias(const DltSystem& sys, double sigma2_point, double sigma2_line);

/// Unit eigenvector of the algebraically smallest eigenvalue, with its
/// largest-magnitude entry made positive. Fills smallest_eig and eig_gap.
/// Throws RepeatedSmallestEigenvalue when the gap is below 1e-12 ||M||_F.
std::pair<ThetaVector, RecoveryDiagnostics> SmallestUnitEigvec(const MatX& m,
                                                               DltMode mode);

/// Scale, sign and SO(3) projection of a 9-vector read as a column-major 3x3.
RotationRecovery RecoverRotation(const Vec9& theta9);

/// Closest matrix with singular values (t, t, 0), t the mean of the top two.
Mat3 RecoverEssential(const Vec9& theta9);

std::pair<Pose, RecoveryDiagnostics> RecoverPosePoint(const ThetaVector& theta);
std::pair<Pose, RecoveryDiagnostics> RecoverPoseLine(const ThetaVector& theta);
std::pair<Pose, RecoveryDiagnostics> RecoverPoseCombined(const ThetaVector& theta);
std::pair<Pose, RecoveryDiagnostics> RecoverPose(const ThetaVector& theta);

/// Which first-step system the counts admit, or nullopt if the pose is
/// underdetermined for this estimator.
std::optional<DltMode> SelectMode(int n_points, int n_lines);

struct EstimatorConfig {
  /// false gives the plain DLT baseline (q used as is).
  bool bias_elimination = true;
  /// Skips variance estimation and uses this value everywhere.
  std::optional<double> sigma2_override;
  /// Estimate point and line noise separately (needs n >= 6 and m >= 9).
  bool split_variance = false;
  /// Gauss-Newton iterations after the first step; 0 stops at the
  /// consistent estimate.
  int gn_iterations = 1;
};

struct FirstStepResult {
  DltMode mode = DltMode::kPoint;
  VarianceEstimate variance;
  double sigma2_point = 0.0;  // variance used for point terms
  double sigma2_line = 0.0;   // variance used for line terms
  bool split = false;
  ThetaVector theta;
  Pose pose;
  RecoveryDiagnostics recovery;
};

/// Dispatches on (n, m), estimates the noise variance, removes the bias and
/// recovers a consistent pose. Throws Underdetermined when no case applies.
FirstStepResult ConsistentEstimate(std::span<const PointCorrespondence> points,
                                   std::span<const LineCorrespondence> lines,
                                   const EstimatorConfig& config = {});

}  // namespace aopnpl
