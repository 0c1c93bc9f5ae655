#include "aopnpl/estimator.hpp"

namespace aopnpl {

EstimateReport Refine(const FirstStepResult& first,
                      std::span<const PointCorrespondence> points,
                      std::span<const LineCorrespondence> lines, int iterations) {
  EstimateReport report;
  report.first_step = first;
  report.refined = first.pose;
  if (iterations > 0) {
    report.gn = GnRefine(first.pose, NoiseWeights{first.sigma2_point, first.sigma2_line},
                         points, lines, iterations);
    report.refined = report.gn.pose;
    report.refined_applied = true;
  }
  return report;
}

EstimateReport Estimate(std::span<const PointCorrespondence> points,
                        std::span<const LineCorrespondence> lines,
                        const EstimatorConfig& config) {
  return Refine(ConsistentEstimate(points, lines, config), points, lines,
                config.gn_iterations);
}

}  // namespace aopnpl
