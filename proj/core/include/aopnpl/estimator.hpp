#pragma once

#include <span>

#include "aopnpl/gn.hpp"
#include "aopnpl/solver.hpp"

namespace aopnpl {

/// Output of the two-step estimator.
struct EstimateReport {
  FirstStepResult first_step;
  Pose refined;         // equals first_step.pose when no GN iteration ran
  GnResult gn;
  bool refined_applied = false;

  const Pose& pose() const { return refined; }
  double sigma2_hat() const { return first_step.variance.sigma2_hat; }
};

/// Consistent first step followed by config.gn_iterations Gauss-Newton
/// updates using every correspondence, whatever the first-step mode.
EstimateReport Estimate(std::span<const PointCorrespondence> points,
                        std::span<const LineCorrespondence> lines,
                        const EstimatorConfig& config = {});

/// Refines an existing first-step result.
EstimateReport Refine(const FirstStepResult& first,
                      std::span<const PointCorrespondence> points,
                      std::span<const LineCorrespondence> lines, int iterations);

}  // namespace aopnpl
