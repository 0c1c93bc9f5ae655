#include "aopnpl/dlt.hpp"

#include "aopnpl/error.hpp"

namespace aopnpl {
namespace {

// Rows 1-2 of the cross-product constraint x^h x (R X + t) = 0, as a 2x12
// block acting on vec([R t]).
Eigen::Matrix<double, 2, 12> PointRows(const PointCorrespondence& c) {
  const Eigen::Matrix<double, 2, 3> s = Hat(Homogeneous(c.image)).topRows<2>();
  Eigen::Matrix<double, 2, 12> rows;
  for (int k = 0; k < 3; ++k) {
    rows.block<2, 3>(0, 3 * k) = c.world(k) * s;
  }
  rows.block<2, 3>(0, 9) = s;
  return rows;
}

// [p^h q^h]^T (L^T kron I3), a 2x18 block acting on vec([R t^R]).
Eigen::Matrix<double, 2, 18> LineRows(const LineCorrespondence& c) {
  const Vec6 l = c.world.stacked();
  const Vec3 ph = Homogeneous(c.image_p);
  const Vec3 qh = Homogeneous(c.image_q);
  Eigen::Matrix<double, 2, 18> rows;
  for (int k = 0; k < 6; ++k) {
    rows.block<1, 3>(0, 3 * k) = l(k) * ph.transpose();
    rows.block<1, 3>(1, 3 * k) = l(k) * qh.transpose();
  }
  return rows;
}

// Adds 2 X^h X^h^T onto the entries that multiply the third row of [R t].
// `t_offset` is the column where the translation block starts.
void AccumulatePointTemplate(const PointCorrespondence& c, int t_offset, MatX& q_tilde) {
  const Eigen::Vector4d xh(c.world.x(), c.world.y(), c.world.z(), 1.0);
  const int idx[4] = {2, 5, 8, t_offset + 2};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      q_tilde(idx[i], idx[j]) += 2.0 * xh(i) * xh(j);
    }
  }
}

// Adds 2 L L^T onto the entries multiplying the first and second rows of
// [R t^R] (the two endpoint-noise coordinates).
void AccumulateLineTemplate(const LineCorrespondence& c, MatX& q_tilde) {
  const Vec6 l = c.world.stacked();
  for (int row = 0; row < 2; ++row) {
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        q_tilde(3 * i + row, 3 * j + row) += 2.0 * l(i) * l(j);
      }
    }
  }
}

void Finalize(DltSystem& sys) {
  const double norm = sys.normalizer();
  sys.q = Symmetrize(sys.a.transpose() * sys.a) / norm;
  sys.q_tilde_point = Symmetrize(sys.q_tilde_point) / norm;
  sys.q_tilde_line = Symmetrize(sys.q_tilde_line) / norm;
  sys.q_tilde_sum = sys.q_tilde_point + sys.q_tilde_line;
}

}  // namespace

std::string_view ModeName(DltMode mode) {
  switch (mode) {
    case DltMode::kPoint: return "point";
    case DltMode::kLine: return "line";
    case DltMode::kCombined: return "combined";
  }
  return "unknown";
}

double DltSystem::normalizer() const {
  switch (mode) {
    case DltMode::kPoint: return static_cast<double>(n_points);
    case DltMode::kLine: return static_cast<double>(n_lines);
    case DltMode::kCombined: return static_cast<double>(n_points + n_lines);
  }
  return 1.0;
}

MatX Symmetrize(const MatX& m) { return 0.5 * (m + m.transpose()); }

DltSystem BuildPointSystem(std::span<const PointCorrespondence> points) {
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyInput, "point system needs at least one correspondence");
  }
  DltSystem sys;
  sys.mode = DltMode::kPoint;
  sys.n_points = static_cast<int>(points.size());
  sys.a.resize(2 * sys.n_points, 12);
  sys.q_tilde_point = MatX::Zero(12, 12);
  sys.q_tilde_line = MatX::Zero(12, 12);
  for (int i = 0; i < sys.n_points; ++i) {
    sys.a.middleRows<2>(2 * i) = PointRows(points[i]);
    AccumulatePointTemplate(points[i], 9, sys.q_tilde_point);
  }
  Finalize(sys);
  return sys;
}

DltSystem BuildLineSystem(std::span<const LineCorrespondence> lines) {
  if (lines.empty()) {
    throw Error(ErrorCode::kEmptyInput, "line system needs at least one correspondence");
  }
  DltSystem sys;
  sys.mode = DltMode::kLine;
  sys.n_lines = static_cast<int>(lines.size());
  sys.a.resize(2 * sys.n_lines, 18);
  sys.q_tilde_point = MatX::Zero(18, 18);
  sys.q_tilde_line = MatX::Zero(18, 18);
  for (int j = 0; j < sys.n_lines; ++j) {
    sys.a.middleRows<2>(2 * j) = LineRows(lines[j]);
    AccumulateLineTemplate(lines[j], sys.q_tilde_line);
  }
  Finalize(sys);
  return sys;
}

DltSystem BuildCombinedSystem(std::span<const PointCorrespondence> points,
                              std::span<const LineCorrespondence> lines) {
  if (points.empty() || lines.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "combined system needs at least one point and one line");
  }
  DltSystem sys;
  sys.mode = DltMode::kCombined;
  sys.n_points = static_cast<int>(points.size());
  sys.n_lines = static_cast<int>(lines.size());
  sys.a = MatX::Zero(2 * (sys.n_points + sys.n_lines), 21);
  sys.q_tilde_point = MatX::Zero(21, 21);
  sys.q_tilde_line = MatX::Zero(21, 21);
  for (int i = 0; i < sys.n_points; ++i) {
    const auto rows = PointRows(points[i]);
    sys.a.block<2, 9>(2 * i, 0) = rows.leftCols<9>();
    sys.a.block<2, 3>(2 * i, 18) = rows.rightCols<3>();
    AccumulatePointTemplate(points[i], 18, sys.q_tilde_point);
  }
  const int offset = 2 * sys.n_points;
  for (int j = 0; j < sys.n_lines; ++j) {
    sys.a.block<2, 18>(offset + 2 * j, 0) = LineRows(lines[j]);
    AccumulateLineTemplate(lines[j], sys.q_tilde_line);
  }
  Finalize(sys);
  return sys;
}

VecX PoseToTheta(DltMode mode, const Pose& pose) {
  const Mat3& r = pose.rotation;
  const Mat3 e = Hat(pose.translation) * r;
  VecX theta(Dimension(mode));
  theta.head<9>() = Eigen::Map<const Vec9>(r.data());
  switch (mode) {
    case DltMode::kPoint:
      theta.segment<3>(9) = pose.translation;
      break;
    case DltMode::kLine:
      theta.segment<9>(9) = Eigen::Map<const Vec9>(e.data());
      break;
    case DltMode::kCombined:
      theta.segment<9>(9) = Eigen::Map<const Vec9>(e.data());
      theta.segment<3>(18) = pose.translation;
      break;
  }
  return theta;
}

}  // namespace aopnpl
