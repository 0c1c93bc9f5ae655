#pragma once

#include <span>
#include <string_view>

#include "aopnpl/camera.hpp"
#include "aopnpl/types.hpp"

namespace aopnpl {

/// Which linear parameterization the system uses.
///   kPoint:    theta = vec([R t])        (12)
///   kLine:     theta = vec([R t^R])      (18)
///   kCombined: theta = vec([R t^R t])    (21)
enum class DltMode { kPoint, kLine, kCombined };

constexpr int Dimension(DltMode mode) {
  switch (mode) {
    case DltMode::kPoint: return 12;
    case DltMode::kLine: return 18;
    case DltMode::kCombined: return 21;
  }
  return 0;
}

std::string_view ModeName(DltMode mode);

/// Stacked homogeneous system A theta = 0 together with its normalized Gram
/// matrix and the noise templates, so that E[q] = q_noise_free + sigma^2 q_tilde_sum.
struct DltSystem {
  DltMode mode = DltMode::kPoint;
  MatX a;             // (2n + 2m) x dim
  MatX q;             // a^T a / normalizer
  MatX q_tilde_point; // point-noise template (zero in line mode)
  MatX q_tilde_line;  // endpoint-noise template (zero in point mode)
  MatX q_tilde_sum;   // q_tilde_point + q_tilde_line
  int n_points = 0;
  int n_lines = 0;

  int dim() const { return Dimension(mode); }
  double normalizer() const;
};

DltSystem BuildPointSystem(std::span<const PointCorrespondence> points);
DltSystem BuildLineSystem(std::span<const LineCorrespondence> lines);
DltSystem BuildCombinedSystem(std::span<const PointCorrespondence> points,
                              std::span<const LineCorrespondence> lines);

/// The (unnormalized) null vector of the noise-free system for `pose`.
VecX PoseToTheta(DltMode mode, const Pose& pose);

/// (M + M^T) / 2.
MatX Symmetrize(const MatX& m);

}  // namespace aopnpl
