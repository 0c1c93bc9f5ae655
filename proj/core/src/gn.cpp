#include "aopnpl/gn.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aopnpl/error.hpp"
#include "aopnpl/so3.hpp"

namespace aopnpl {
namespace {

constexpr double kMaxNormalCondition = 1e14;

Eigen::Matrix<double, 3, 9> KronRowI3(const Vec3& v) {
  Eigen::Matrix<double, 3, 9> out;
  for (int k = 0; k < 3; ++k) {
    out.block<3, 3>(0, 3 * k) = v(k) * Mat3::Identity();
  }
  return out;
}

// A zero variance carries no scale information; whitening by it would
// divide by zero. The step is invariant to a common weight scale, so fall
// back to a unit (or relative) scale.
NoiseWeights Sanitize(NoiseWeights w) {
  const double top = std::max(w.point_sigma2, w.line_sigma2);
  if (!(top > 0.0)) return NoiseWeights{1.0, 1.0};
  const double floor = 1e-12 * top;
  w.point_sigma2 = std::max(w.point_sigma2, floor);
  w.line_sigma2 = std::max(w.line_sigma2, floor);
  return w;
}

}  // namespace

Mat9x3 PsiAtZero() {
  Mat9x3 psi;
  for (int k = 0; k < 3; ++k) {
    const Mat3 h = Hat(Vec3::Unit(k));
    psi.col(k) = Eigen::Map<const Vec9>(h.data());
  }
  return psi;
}

Mat2x6 PointJacobianBlock(const Pose& pose, const PointCorrespondence& c) {
  const Vec3 xc = pose.rotation * c.world + pose.translation;
  const double den = xc.z();
  if (den <= kDepthEps) {
    throw Error(ErrorCode::kBehindCamera, "point behind camera in Jacobian");
  }
  const Vec2 num = xc.head<2>();
  // (num e3^T - den E) / den^2
  Eigen::Matrix<double, 2, 3> d_xc = Eigen::Matrix<double, 2, 3>::Zero();
  d_xc.col(2) = num;
  d_xc.leftCols<2>() -= den * Eigen::Matrix2d::Identity();
  d_xc /= den * den;

  // d(R exp(s^) X)/ds^T = (X^T kron R) Psi
  Eigen::Matrix<double, 3, 9> x_kron_r;
  for (int k = 0; k < 3; ++k) {
    x_kron_r.block<3, 3>(0, 3 * k) = c.world(k) * pose.rotation;
  }
  Mat2x6 block;
  block.leftCols<3>() = d_xc * x_kron_r * PsiAtZero();
  block.rightCols<3>() = d_xc;
  return block;
}

Mat2x6 LineJacobianBlock(const Pose& pose, const LineCorrespondence& c, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "line Jacobian needs sigma2 > 0");
  }
  const Mat3& r = pose.rotation;
  const Vec3& t = pose.translation;
  const Vec3 l = ProjectLine(pose, c.world);
  const double l12 = l.head<2>().norm();
  if (l12 <= 1e-12) {
    throw Error(ErrorCode::kDegenerateProjectedLine,
                "projected line passes through the optical centre");
  }
  const double sigma = std::sqrt(sigma2);
  const double sigma_j = sigma * l12;

  Eigen::Matrix<double, 2, 3> pq;
  pq.row(0) = Homogeneous(c.image_p).transpose();
  pq.row(1) = Homogeneous(c.image_q).transpose();
  const Vec2 res = pq * l;

  // dl/ds^T = (L1 + t^ L2)(I3 kron R) Psi, dl/dt^T = -(R d)^
  const Eigen::Matrix<double, 3, 9> lbar1 = KronRowI3(c.world.moment);
  const Eigen::Matrix<double, 3, 9> lbar2 = KronRowI3(c.world.direction);
  Eigen::Matrix<double, 9, 9> kron_r = Eigen::Matrix<double, 9, 9>::Zero();
  for (int k = 0; k < 3; ++k) kron_r.block<3, 3>(3 * k, 3 * k) = r;
  const Mat3 dl_ds = (lbar1 + Hat(t) * lbar2) * kron_r * PsiAtZero();
  const Mat3 dl_dt = -Hat(r * c.world.direction);

  // d(1/sigma_j) = -[l]_{1:2}^T d[l]_{1:2} / (sigma ||[l]_{1:2}||^3)
  const double inv_cube = 1.0 / (sigma * l12 * l12 * l12);
  const Eigen::RowVector3d dinv_ds = -inv_cube * l.head<2>().transpose() * dl_ds.topRows<2>();
  const Eigen::RowVector3d dinv_dt = -inv_cube * l.head<2>().transpose() * dl_dt.topRows<2>();

  Mat2x6 block;
  block.leftCols<3>() = pq * dl_ds / sigma_j + res * dinv_ds;
  block.rightCols<3>() = pq * dl_dt / sigma_j + res * dinv_dt;
  return block;
}

GnWorkspace BuildGnWorkspace(const Pose& pose, const NoiseWeights& weights,
                             std::span<const PointCorrespondence> points,
                             std::span<const LineCorrespondence> lines) {
  const NoiseWeights w = Sanitize(weights);
  const int n = static_cast<int>(points.size());
  const int m = static_cast<int>(lines.size());
  GnWorkspace ws;
  ws.jacobian.resize(2 * (n + m), 6);
  ws.residual.resize(2 * (n + m));
  const double inv_sigma_p = 1.0 / std::sqrt(w.point_sigma2);
  for (int i = 0; i < n; ++i) {
    ws.jacobian.middleRows<2>(2 * i) = inv_sigma_p * PointJacobianBlock(pose, points[i]);
    ws.residual.segment<2>(2 * i) = inv_sigma_p * PointResidual(pose, points[i]);
  }
  for (int j = 0; j < m; ++j) {
    const int row = 2 * (n + j);
    const double sigma_j = std::sqrt(LineWeightVariance(pose, lines[j].world, w.line_sigma2));
    ws.jacobian.middleRows<2>(row) = LineJacobianBlock(pose, lines[j], w.line_sigma2);
    ws.residual.segment<2>(row) = LineResidual(pose, lines[j]) / sigma_j;
  }
  return ws;
}

Vec6 SolveGnStep(const GnWorkspace& ws, double* condition) {
  if (ws.jacobian.rows() < 6) {
    throw Error(ErrorCode::kSingularNormalEquations,
                "fewer than six residual rows for a 6-DoF step");
  }
  const Eigen::ColPivHouseholderQR<MatX> qr(ws.jacobian);
  const Eigen::Matrix<double, 6, 6> r_factor =
      qr.matrixR().topLeftCorner(6, 6).triangularView<Eigen::Upper>();
  const Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(r_factor);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(5);
  const double cond = smin > 0.0 ? (smax / smin) * (smax / smin)
                                 : std::numeric_limits<double>::infinity();
  if (condition != nullptr) *condition = cond;
  if (!(cond <= kMaxNormalCondition)) {
    throw Error(ErrorCode::kSingularNormalEquations,
                "normal equations are singular (cond = " + std::to_string(cond) + ")");
  }
  return qr.solve(-ws.residual);
}

GnResult GnRefine(const Pose& init, const NoiseWeights& weights,
                  std::span<const PointCorrespondence> points,
                  std::span<const LineCorrespondence> lines, int iterations) {
  GnResult out;
  out.pose = init;
  for (int k = 0; k < iterations; ++k) {
    const GnWorkspace ws = BuildGnWorkspace(out.pose, weights, points, lines);
    const Vec6 step = SolveGnStep(ws, &out.condition);
    out.pose.rotation = Retract(out.pose.rotation, step.head<3>());
    out.pose.translation += step.tail<3>();
    out.last_step = step;
    out.iterations = k + 1;
    const double scale = 1.0 + out.pose.translation.norm();
    if (step.norm() <= 1e-15 * scale) break;
  }
  return out;
}

Pose GnStep(const Pose& init, double sigma2_hat,
            std::span<const PointCorrespondence> points,
            std::span<const LineCorrespondence> lines) {
  return GnRefine(init, NoiseWeights{sigma2_hat, sigma2_hat}, points, lines, 1).pose;
}

}  // namespace aopnpl
