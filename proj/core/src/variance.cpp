#include "aopnpl/variance.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <string>

#include "aopnpl/error.hpp"

namespace aopnpl {
namespace {

constexpr double kMaxCondition = 1e14;

}  // namespace

bool HasMinimumCounts(DltMode mode, int n_points, int n_lines) {
  switch (mode) {
    case DltMode::kPoint: return n_points >= 6;
    case DltMode::kLine: return n_lines >= 9;
    case DltMode::kCombined:
      return n_points >= 2 && n_lines >= 5 && n_points + n_lines >= 11;
  }
  return false;
}

VarianceEstimate EstimateSigma2(const DltSystem& sys) {
  return EstimateSigma2(sys, sys.q_tilde_sum);
}

VarianceEstimate EstimateSigma2(const DltSystem& sys, const MatX& q_tilde) {
  if (!HasMinimumCounts(sys.mode, sys.n_points, sys.n_lines)) {
    throw Error(ErrorCode::kInsufficientCorrespondences,
                "too few correspondences for " + std::string(ModeName(sys.mode)) +
                    " variance estimation");
  }
  const int dim = sys.dim();

  // One null direction is expected (the true theta when noise vanishes);
  // the condition estimate therefore skips the smallest eigenvalue.
  const Eigen::SelfAdjointEigenSolver<MatX> q_eig(sys.q, Eigen::EigenvaluesOnly);
  const VecX& lam = q_eig.eigenvalues();
  const double lam_max = lam(dim - 1);
  if (!(lam_max > 0.0) || lam(1) * kMaxCondition < lam_max) {
    throw Error(ErrorCode::kIllConditionedGram,
                "Gram matrix is rank deficient beyond its expected null direction");
  }

  VarianceEstimate est;
  est.mode = sys.mode;

  Eigen::LLT<MatX> llt(sys.q);
  if (llt.info() != Eigen::Success) {
    est.regularized = true;
    llt.compute(sys.q + (1e-14 * sys.q.trace()) * MatX::Identity(dim, dim));
  }
  // C = L^-1 q_tilde L^-T shares its spectrum with q^-1 q_tilde.
  MatX c = llt.matrixL().solve(q_tilde);
  c = llt.matrixL().solve(c.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<MatX> c_eig(Symmetrize(c), Eigen::EigenvaluesOnly);
  est.lambda_max = c_eig.eigenvalues()(dim - 1);
  if (est.lambda_max > 0.0) {
    est.sigma2_hat = 1.0 / est.lambda_max;
  } else {
    est.sigma2_hat = 0.0;
    est.clamped = true;
  }
  return est;
}

}  // namespace aopnpl
