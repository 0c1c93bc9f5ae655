#pragma once

#include "aopnpl/dlt.hpp"

namespace aopnpl {

struct VarianceEstimate {
  double sigma2_hat = 0.0;
  double lambda_max = 0.0;  // largest generalized eigenvalue of (q_tilde, q)
  DltMode mode = DltMode::kPoint;
  bool clamped = false;     // lambda_max <= 0, sigma2_hat forced to 0
  bool regularized = false; // q needed a diagonal shift to factor
};

/// Smallest counts for which q is invertible with probability one.
bool HasMinimumCounts(DltMode mode, int n_points, int n_lines);

/// sigma2_hat = 1 / lambda_max(q^-1 q_tilde_sum), computed from the
/// symmetric-definite pencil (q_tilde_sum, q) through a Cholesky reduction.
/// Throws InsufficientCorrespondences or IllConditionedGram.
VarianceEstimate EstimateSigma2(const DltSystem& sys);

/// Same estimator against an explicit noise template, e.g. only the point
/// part of a combined system.
VarianceEstimate EstimateSigma2(const DltSystem& sys, const MatX& q_tilde);

}  // namespace aopnpl
