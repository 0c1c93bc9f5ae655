#include "aopnpl/crb.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include "aopnpl/dlt.hpp"
#include "aopnpl/error.hpp"

namespace aopnpl {

ThetaJacobian PointThetaJacobian(const Pose& pose, const PointCorrespondence& c) {
  const Vec3 xc = pose.rotation * c.world + pose.translation;
  const double den = xc.z();
  if (den <= kDepthEps) {
    throw Error(ErrorCode::kBehindCamera, "point behind camera at the true pose");
  }
  Eigen::Matrix<double, 2, 3> d_xc = Eigen::Matrix<double, 2, 3>::Zero();
  d_xc.col(2) = xc.head<2>();
  d_xc.leftCols<2>() -= den * Eigen::Matrix2d::Identity();
  d_xc /= den * den;

  ThetaJacobian jac;
  for (int k = 0; k < 3; ++k) {
    jac.block<2, 3>(0, 3 * k) = c.world(k) * d_xc;  // X_bar = X^T kron I3
  }
  jac.rightCols<3>() = d_xc;
  return jac;
}

ThetaJacobian LineThetaJacobian(const Pose& pose, const LineCorrespondence& c) {
  Eigen::Matrix<double, 2, 3> pq;
  pq.row(0) = Homogeneous(c.image_p).transpose();
  pq.row(1) = Homogeneous(c.image_q).transpose();
  const Mat3 t_hat = Hat(pose.translation);
  ThetaJacobian jac;
  for (int k = 0; k < 3; ++k) {
    // (L1 + t^ L2) with L1 = m^T kron I3, L2 = d^T kron I3
    jac.block<2, 3>(0, 3 * k) =
        pq * (c.world.moment(k) * Mat3::Identity() + c.world.direction(k) * t_hat);
  }
  jac.rightCols<3>() = -pq * Hat(pose.rotation * c.world.direction);
  return jac;
}

Mat12 FisherInformation(const Pose& true_pose, std::span<const PointCorrespondence> points,
                        std::span<const LineCorrespondence> lines, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Fisher information needs sigma2 > 0");
  }
  Mat12 f = Mat12::Zero();
  for (const auto& c : points) {
    const ThetaJacobian j = PointThetaJacobian(true_pose, c);
    f.noalias() += j.transpose() * j / sigma2;
  }
  for (const auto& c : lines) {
    const ThetaJacobian j = LineThetaJacobian(true_pose, c);
    f.noalias() += j.transpose() * j / LineWeightVariance(true_pose, c.world, sigma2);
  }
  return 0.5 * (f + f.transpose());
}

Mat6x12 ConstraintJacobian(const Vec12& theta) {
  const Vec3 c1 = theta.segment<3>(0);
  const Vec3 c2 = theta.segment<3>(3);
  const Vec3 c3 = theta.segment<3>(6);
  Mat6x12 h = Mat6x12::Zero();
  h.block<1, 3>(0, 0) = 2.0 * c1.transpose();
  h.block<1, 3>(1, 0) = c2.transpose();
  h.block<1, 3>(1, 3) = c1.transpose();
  h.block<1, 3>(2, 0) = c3.transpose();
  h.block<1, 3>(2, 6) = c1.transpose();
  h.block<1, 3>(3, 3) = 2.0 * c2.transpose();
  h.block<1, 3>(4, 3) = c3.transpose();
  h.block<1, 3>(4, 6) = c2.transpose();
  h.block<1, 3>(5, 6) = 2.0 * c3.transpose();
  return h;
}

Eigen::Matrix<double, 12, 6> ConstraintNullspace(const Vec12& theta) {
  const Mat6x12 h = ConstraintJacobian(theta);
  const Eigen::JacobiSVD<Mat6x12> svd(h, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(5) > 1e-12 * sv(0))) {
    throw Error(ErrorCode::kRankDeficientConstraints,
                "constraint Jacobian does not have full row rank");
  }
  return svd.matrixV().rightCols<6>();
}

CrbResult ConstrainedCrb(const Mat12& fisher, const Vec12& theta) {
  const Eigen::Matrix<double, 12, 6> u = ConstraintNullspace(theta);
  const Eigen::Matrix<double, 6, 6> projected = u.transpose() * fisher * u;
  const Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(projected);
  const auto& sv = svd.singularValues();
  if (!(sv(5) > 0.0) || sv(0) / sv(5) > 1e14) {
    throw Error(ErrorCode::kSingularProjectedFisher,
                "projected Fisher information is singular");
  }
  CrbResult out;
  out.fisher = fisher;
  out.constrained = u * projected.inverse() * u.transpose();
  out.constrained = 0.5 * (out.constrained + out.constrained.transpose()).eval();
  out.trace_bound = out.constrained.trace();
  out.rotation_trace = out.constrained.diagonal().head<9>().sum();
  out.translation_trace = out.constrained.diagonal().tail<3>().sum();
  return out;
}

CrbResult ComputeCrb(const Pose& true_pose, std::span<const PointCorrespondence> points,
                     std::span<const LineCorrespondence> lines, double sigma2) {
  const Vec12 theta = PoseToTheta(DltMode::kPoint, true_pose);
  return ConstrainedCrb(FisherInformation(true_pose, points, lines, sigma2), theta);
}

}  // namespace aopnpl
