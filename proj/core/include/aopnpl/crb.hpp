#pragma once

#include <span>

#include "aopnpl/camera.hpp"
#include "aopnpl/types.hpp"

namespace aopnpl {

/// Cramér-Rao bound for theta = vec([R t]) under the SO(3) constraint.
struct CrbResult {
  Mat12 fisher;
  Mat12 constrained;         // U (U^T F U)^-1 U^T
  double trace_bound = 0.0;  // tr(constrained)
  double rotation_trace = 0.0;     // first 9 diagonal entries
  double translation_trace = 0.0;  // last 3
};

using ThetaJacobian = Eigen::Matrix<double, 2, 12>;

/// d r_p / d vec([R t])^T.
ThetaJacobian PointThetaJacobian(const Pose& pose, const PointCorrespondence& c);
/// d r_l / d vec([R t])^T.
ThetaJacobian LineThetaJacobian(const Pose& pose, const LineCorrespondence& c);

/// Sum of J^T Sigma^-1 J over all correspondences at the true pose; line
/// terms use Sigma_j = sigma2 ||[l]_{1:2}||^2 I.
Mat12 FisherInformation(const Pose& true_pose, std::span<const PointCorrespondence> points,
                        std::span<const LineCorrespondence> lines, double sigma2);

/// Gradient of the six orthonormality constraints on the columns of R.
Mat6x12 ConstraintJacobian(const Vec12& theta);

/// Orthonormal basis of the nullspace of ConstraintJacobian(theta).
Eigen::Matrix<double, 12, 6> ConstraintNullspace(const Vec12& theta);

CrbResult ConstrainedCrb(const Mat12& fisher, const Vec12& theta);

/// Convenience: Fisher information and bound at `true_pose`.
CrbResult ComputeCrb(const Pose& true_pose, std::span<const PointCorrespondence> points,
                     std::span<const LineCorrespondence> lines, double sigma2);

}  // namespace aopnpl
