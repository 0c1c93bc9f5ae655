#pragma once

#include <span>

#include "aopnpl/camera.hpp"
#include "aopnpl/types.hpp"

namespace aopnpl {

/// d vec(exp(s^)) / d s^T at s = 0; column k is vec(hat(e_k)).
Mat9x3 PsiAtZero();

/// d r_p / d[s; t] at s = 0 for the lifted point residual
/// x - h(R exp(s^), t). Not whitened.
Mat2x6 PointJacobianBlock(const Pose& pose, const PointCorrespondence& c);

/// d (r_l / sigma_j) / d[s; t] at s = 0, where sigma_j = sigma ||[l]_{1:2}||
/// is itself evaluated at the lifted pose. Includes the weight-derivative term.
Mat2x6 LineJacobianBlock(const Pose& pose, const LineCorrespondence& c, double sigma2);

/// Variances used to whiten point and line residuals.
struct NoiseWeights {
  double point_sigma2 = 1.0;
  double line_sigma2 = 1.0;
};

/// Whitened residual and Jacobian at (s = 0, t = pose.translation).
/// Rows: points first, then lines, two per correspondence.
struct GnWorkspace {
  MatX jacobian;  // (2n + 2m) x 6
  VecX residual;  // (2n + 2m)
  Vec6 step = Vec6::Zero();  // [s; t] increment
};

GnWorkspace BuildGnWorkspace(const Pose& pose, const NoiseWeights& weights,
                             std::span<const PointCorrespondence> points,
                             std::span<const LineCorrespondence> lines);

struct GnResult {
  Pose pose;
  Vec6 last_step = Vec6::Zero();
  int iterations = 0;
  double condition = 0.0;  // cond(J^T J) at the last linearization
};

/// Runs `iterations` Gauss-Newton updates R <- R exp(s^), t <- t + dt.
/// Stops early once the step is at machine precision.
/// Throws SingularNormalEquations when cond(J^T J) > 1e14.
GnResult GnRefine(const Pose& init, const NoiseWeights& weights,
                  std::span<const PointCorrespondence> points,
                  std::span<const LineCorrespondence> lines, int iterations = 1);

/// A single iteration with a shared variance.
Pose GnStep(const Pose& init, double sigma2_hat,
            std::span<const PointCorrespondence> points,
            std::span<const LineCorrespondence> lines);

/// Least-squares solution of J step = -r by column-pivoted QR.
Vec6 SolveGnStep(const GnWorkspace& ws, double* condition = nullptr);

}  // namespace aopnpl
