#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "aopnpl/camera.hpp"
#include "aopnpl/error.hpp"
#include "test_util.hpp"

namespace aopnpl {
namespace {

const CameraIntrinsics kK = CameraIntrinsics::FromFocal(800, 320, 240);

Pose ReferencePose() {
  return Pose{RotationFromEuler(Vec3::Constant(std::numbers::pi / 3)), Vec3::Constant(2.0)};
}

TEST(Intrinsics, Validation) {
  Mat3 bad = kK.matrix();
  bad(0, 0) = -1;
  EXPECT_THROW(CameraIntrinsics{bad}, Error);
  bad = kK.matrix();
  bad(2, 2) = 2;
  EXPECT_THROW(CameraIntrinsics{bad}, Error);
  bad = kK.matrix();
  bad(1, 0) = 0.5;
  EXPECT_THROW(CameraIntrinsics{bad}, Error);
}

TEST(NormalizePixel, Examples) {
  EXPECT_LT(NormalizePixel(kK, Vec2(320, 240)).norm(), 1e-15);
  EXPECT_LT((NormalizePixel(kK, Vec2(1120, 240)) - Vec2(1, 0)).norm(), 1e-15);
  const CameraIntrinsics id{Mat3::Identity()};
  EXPECT_EQ(NormalizePixel(id, Vec2(3.5, -2)), Vec2(3.5, -2));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec2 px = testing::RandomVec3(rng, 300).head<2>();
    EXPECT_LT((kK.ToPixel(kK.Normalize(px)) - px).norm(), 1e-12);
    EXPECT_LT((kK.matrix() * Homogeneous(kK.Normalize(px)) - Homogeneous(px)).norm(), 1e-12);
  }
}

TEST(ProjectPoint, Examples) {
  EXPECT_LT(ProjectPoint(Pose{}, Vec3(0, 0, 5)).norm(), 1e-15);
  EXPECT_LT((ProjectPoint(Pose{}, Vec3(1, 2, 2)) - Vec2(0.5, 1)).norm(), 1e-15);
  EXPECT_THROW(ProjectPoint(Pose{}, Vec3(1, 1, 0)), Error);
  EXPECT_THROW(ProjectPoint(Pose{}, Vec3(1, 1, -1)), Error);
}

TEST(ProjectPoint, InvertsLifting) {
  const Pose pose = ReferencePose();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(0, 640), uy(0, 480), ud(2, 10);
  for (int i = 0; i < 100; ++i) {
    const Vec2 u = kK.Normalize(Vec2(ux(rng), uy(rng)));
    const Vec3 world = pose.rotation.transpose() * (ud(rng) * Homogeneous(u) - pose.translation);
    EXPECT_LT((ProjectPoint(pose, world) - u).norm(), 1e-10);
  }
}

TEST(ProjectLine, IncidenceWithProjectedEndpoints) {
  const PluckerLine l = PluckerFromEndpoints(Vec3(-1, 0, 2), Vec3(1, 0, 2));
  const Vec3 lbar = ProjectLine(Pose{}, l);
  EXPECT_LT(std::abs(lbar.x()), 1e-15);
  EXPECT_LT(std::abs(lbar.z()), 1e-15);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Pose pose = testing::RandomPose(rng);
    if (i % 4 == 0) pose.translation.setZero();
    const Vec3 p = testing::PointInFront(pose, rng);
    const Vec3 q = testing::PointInFront(pose, rng);
    const PluckerLine line = PluckerFromEndpoints(p, q);
    const Vec3 lb = ProjectLine(pose, line);
    const double scale = lb.norm();
    EXPECT_LT(std::abs(lb.dot(Homogeneous(ProjectPoint(pose, p)))), 1e-12 * scale);
    EXPECT_LT(std::abs(lb.dot(Homogeneous(ProjectPoint(pose, q)))), 1e-12 * scale);
    const PluckerLine scaled{2.5 * line.moment, 2.5 * line.direction};
    EXPECT_LT((ProjectLine(pose, scaled) - 2.5 * lb).norm(), 1e-12 * scale);
  }
}

TEST(PointResidual, Behaviour) {
  std::mt19937_64 rng(4);
  const Pose pose = testing::RandomPose(rng);
  PointCorrespondence c = testing::ExactPoint(pose, rng);
  EXPECT_LT(PointResidual(pose, c).norm(), 1e-14);
  const Vec2 eps(1e-3, -2e-3);
  c.image += eps;
  EXPECT_LT((PointResidual(pose, c) - eps).norm(), 1e-14);

  const Pose other{Retract(pose.rotation, Vec3(0.01, 0.02, -0.01)), pose.translation};
  const Vec3 xc = other.rotation * c.world + other.translation;
  EXPECT_LT((PointResidual(other, c) - (c.image - xc.head<2>() / xc.z())).norm(), 1e-14);
}

TEST(LineResidual, Behaviour) {
  std::mt19937_64 rng(5);
  const Pose pose = testing::RandomPose(rng);
  const LineCorrespondence c = testing::ExactLine(pose, rng);
  EXPECT_LT(LineResidual(pose, c).norm(), 1e-13);

  LineCorrespondence swapped = c;
  std::swap(swapped.image_p, swapped.image_q);
  const Pose other = testing::RandomPose(rng);
  const Vec2 r = LineResidual(other, c);
  const Vec2 rs = LineResidual(other, swapped);
  EXPECT_EQ(r.x(), rs.y());
  EXPECT_EQ(r.y(), rs.x());

  const Vec3 lb = ProjectLine(other, c.world);
  EXPECT_LT(std::abs(r.x() - Homogeneous(c.image_p).dot(lb)), 1e-13);
  EXPECT_LT(std::abs(r.y() - Homogeneous(c.image_q).dot(lb)), 1e-13);
}

TEST(LineWeightVariance, Examples) {
  const PluckerLine line{Vec3(3, 4, 5), Vec3(4, -3, 0)};
  EXPECT_EQ(LineWeightVariance(Pose{}, line, 0.0), 0.0);
  EXPECT_NEAR(LineWeightVariance(Pose{}, line, 1.0), 25.0, 1e-12);
  EXPECT_NEAR(LineWeightVariance(Pose{}, line, 3.0), 75.0, 1e-12);
  const PluckerLine flat{Vec3(0, 0, 1), Vec3(1, 0, 0)};
  EXPECT_THROW(LineWeightVariance(Pose{}, flat, 1.0), Error);
}

TEST(LineWeightVariance, MatchesSampledPropagation) {
  std::mt19937_64 rng(6);
  const Pose pose = testing::RandomPose(rng);
  const LineCorrespondence c = testing::ExactLine(pose, rng);
  const double sigma = 0.01;
  const Vec3 lb = ProjectLine(pose, c.world);
  std::normal_distribution<double> n(0.0, sigma);
  const int draws = 100000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < draws; ++i) {
    const double v = lb.dot(Vec3(n(rng), n(rng), 0.0));
    sum += v;
    sum2 += v * v;
  }
  const double var = sum2 / draws - (sum / draws) * (sum / draws);
  const double expected = LineWeightVariance(pose, c.world, sigma * sigma);
  EXPECT_NEAR(var / expected, 1.0, 0.03);
}

TEST(MlObjective, Behaviour) {
  std::mt19937_64 rng(7);
  const Pose pose = testing::RandomPose(rng);
  std::vector<PointCorrespondence> pts;
  std::vector<LineCorrespondence> lines;
  for (int i = 0; i < 20; ++i) pts.push_back(testing::ExactPoint(pose, rng));
  for (int i = 0; i < 15; ++i) lines.push_back(testing::ExactLine(pose, rng));
  const double s2 = 1e-4;
  EXPECT_LT(MlObjective(pose, pts, lines, s2), 1e-20);

  for (auto& c : pts) testing::Perturb(c, rng, 0.01);
  for (auto& c : lines) testing::Perturb(c, rng, 0.01);
  const double f = MlObjective(pose, pts, lines, s2);
  EXPECT_GT(f, 0.0);

  double manual = 0.0;
  for (const auto& c : pts) manual += PointResidual(pose, c).squaredNorm() / s2;
  for (const auto& c : lines) {
    manual += LineResidual(pose, c).squaredNorm() / LineWeightVariance(pose, c.world, s2);
  }
  manual /= static_cast<double>(pts.size() + lines.size());
  EXPECT_NEAR(f, manual, 1e-12 * manual);

  std::reverse(pts.begin(), pts.end());
  std::shuffle(lines.begin(), lines.end(), rng);
  EXPECT_NEAR(MlObjective(pose, pts, lines, s2), f, 1e-12 * f);
}

TEST(LineCorrespondence, MakeNormalizes) {
  const LineCorrespondence c =
      LineCorrespondence::Make(Vec3(0, 0, 4), Vec3(3, 1, 6), Vec2(0, 0), Vec2(0.5, 0.1));
  EXPECT_NEAR(c.world.direction.norm(), std::sqrt(3.0), 1e-12);
  const PluckerLine rebuilt = PluckerFromEndpoints(c.endpoint_p, c.endpoint_q);
  EXPECT_EQ(rebuilt.moment, c.world.moment);
  EXPECT_EQ(rebuilt.direction, c.world.direction);
}

}  // namespace
}  // namespace aopnpl
