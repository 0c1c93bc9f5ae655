#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "aopnpl/dlt.hpp"
#include "aopnpl/error.hpp"
#include "test_util.hpp"

namespace aopnpl {
namespace {

struct Data {
  Pose pose;
  std::vector<PointCorrespondence> points;
  std::vector<LineCorrespondence> lines;
};

Data MakeData(std::uint64_t seed, int n, int m) {
  std::mt19937_64 rng(seed);
  Data d;
  d.pose = testing::RandomPose(rng);
  for (int i = 0; i < n; ++i) d.points.push_back(testing::ExactPoint(d.pose, rng));
  for (int j = 0; j < m; ++j) d.lines.push_back(testing::ExactLine(d.pose, rng));
  return d;
}

void ExpectNullVector(const DltSystem& sys, const Pose& pose) {
  const VecX theta = PoseToTheta(sys.mode, pose);
  EXPECT_LT((sys.a * theta).norm(), 1e-10 * sys.a.norm() * theta.norm());
}

void ExpectSymmetricPsd(const MatX& m) {
  EXPECT_EQ(m, m.transpose());
  Eigen::SelfAdjointEigenSolver<MatX> es(m);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-9 * std::max(1.0, m.norm()));
}

TEST(Dlt, Dimensions) {
  EXPECT_EQ(Dimension(DltMode::kPoint), 12);
  EXPECT_EQ(Dimension(DltMode::kLine), 18);
  EXPECT_EQ(Dimension(DltMode::kCombined), 21);
}

TEST(Dlt, EmptyInputs) {
  const Data d = MakeData(1, 3, 3);
  EXPECT_THROW(BuildPointSystem({}), Error);
  EXPECT_THROW(BuildLineSystem({}), Error);
  EXPECT_THROW(BuildCombinedSystem(d.points, {}), Error);
  EXPECT_THROW(BuildCombinedSystem({}, d.lines), Error);
}

TEST(Dlt, NoiseFreeNullVectors) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Data d = MakeData(seed, 12, 12);
    const DltSystem p = BuildPointSystem(d.points);
    const DltSystem l = BuildLineSystem(d.lines);
    const DltSystem c = BuildCombinedSystem(d.points, d.lines);
    for (const DltSystem* s : {&p, &l, &c}) {
      EXPECT_EQ(s->a.rows(), 2 * (s->n_points + s->n_lines));
      EXPECT_EQ(s->a.cols(), s->dim());
      ExpectNullVector(*s, d.pose);
      ExpectSymmetricPsd(s->q);
      ExpectSymmetricPsd(s->q_tilde_sum);
      EXPECT_LT((s->q - Symmetrize(s->a.transpose() * s->a) / s->normalizer()).norm(),
                1e-12 * s->q.norm());
    }
    EXPECT_EQ(p.normalizer(), 12.0);
    EXPECT_EQ(l.normalizer(), 12.0);
    EXPECT_EQ(c.normalizer(), 24.0);
  }
}

TEST(Dlt, PointRankEleven) {
  const Data d = MakeData(5, 6, 0);
  const DltSystem s = BuildPointSystem(d.points);
  Eigen::JacobiSVD<MatX> svd(s.a);
  const VecX sv = svd.singularValues();
  EXPECT_GT(sv(10), 1e-6 * sv(0));
  EXPECT_LT(sv(11), 1e-12 * sv(0));
}

TEST(Dlt, NineLinesGiveOneDimensionalNullSpace) {
  const Data d = MakeData(6, 0, 9);
  const DltSystem s = BuildLineSystem(d.lines);
  Eigen::SelfAdjointEigenSolver<MatX> es(s.q);
  const VecX ev = es.eigenvalues();
  EXPECT_LT(ev(0), 1e-12 * ev(17));
  EXPECT_GT(ev(1), 1e-8 * ev(17));
  const VecX theta = PoseToTheta(DltMode::kLine, d.pose).normalized();
  EXPECT_NEAR(std::abs(es.eigenvectors().col(0).dot(theta)), 1.0, 1e-9);
}

TEST(Dlt, CombinedBlockStructure) {
  const Data d = MakeData(7, 10, 8);
  const DltSystem c = BuildCombinedSystem(d.points, d.lines);
  const int np = 2 * 10;
  EXPECT_EQ(c.a.topRows(np).middleCols(9, 9).norm(), 0.0);
  EXPECT_EQ(c.a.bottomRows(16).rightCols(3).norm(), 0.0);

  const DltSystem p = BuildPointSystem(d.points);
  const DltSystem l = BuildLineSystem(d.lines);
  MatX expected = MatX::Zero(21, 21);
  const MatX gp = p.a.transpose() * p.a;
  const std::array<int, 12> map{0, 1, 2, 3, 4, 5, 6, 7, 8, 18, 19, 20};
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) expected(map[i], map[j]) += gp(i, j);
  }
  expected.topLeftCorner(18, 18) += l.a.transpose() * l.a;
  expected /= 18.0;
  EXPECT_LT((c.q - expected).norm(), 1e-12 * expected.norm());

  MatX expected_tilde = MatX::Zero(21, 21);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      expected_tilde(map[i], map[j]) += p.q_tilde_sum(i, j) * 10.0;
    }
  }
  expected_tilde.topLeftCorner(18, 18) += l.q_tilde_sum * 8.0;
  expected_tilde /= 18.0;
  EXPECT_LT((c.q_tilde_sum - expected_tilde).norm(), 1e-12 * expected_tilde.norm());
}

// E[Q - Q_exact] = sigma^2 Q_tilde, checked entrywise against the sampling band.
// Q is quadratic in the image noise, so each sample averages the draws e and
// -e: the zero-mean first-order term cancels and only the second-order part
// whose expectation is being tested remains.
void CheckExpectation(const Data& d, DltMode mode, double sigma) {
  auto build = [&](const std::vector<PointCorrespondence>& p,
                   const std::vector<LineCorrespondence>& l) {
    switch (mode) {
      case DltMode::kPoint: return BuildPointSystem(p);
      case DltMode::kLine: return BuildLineSystem(l);
      default: return BuildCombinedSystem(p, l);
    }
  };
  const DltSystem exact = build(d.points, d.lines);
  const int dim = exact.dim();
  const int draws = 10000;
  MatX sum = MatX::Zero(dim, dim);
  MatX sum2 = MatX::Zero(dim, dim);
  std::mt19937_64 rng(99);
  for (int k = 0; k < draws; ++k) {
    auto pts = d.points;
    auto lines = d.lines;
    for (auto& c : pts) testing::Perturb(c, rng, sigma);
    for (auto& c : lines) testing::Perturb(c, rng, sigma);
    auto mirror_pts = d.points;
    auto mirror_lines = d.lines;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      mirror_pts[i].image = 2.0 * d.points[i].image - pts[i].image;
    }
    for (std::size_t j = 0; j < lines.size(); ++j) {
      mirror_lines[j].image_p = 2.0 * d.lines[j].image_p - lines[j].image_p;
      mirror_lines[j].image_q = 2.0 * d.lines[j].image_q - lines[j].image_q;
    }
    const MatX diff =
        0.5 * (build(pts, lines).q + build(mirror_pts, mirror_lines).q) - exact.q;
    sum += diff;
    sum2 += diff.cwiseProduct(diff);
  }
  const MatX mean = sum / draws;
  const MatX var = sum2 / draws - mean.cwiseProduct(mean);
  const MatX expected = sigma * sigma * exact.q_tilde_sum;
  int outside = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double band = 3.0 * std::sqrt(std::max(var(i, j), 0.0) / draws) + 1e-15;
      if (std::abs(mean(i, j) - expected(i, j)) > band) ++outside;
    }
  }
  EXPECT_EQ(outside, 0) << ModeName(mode);
  // The template must carry the bulk of the mean shift, not just fit noise.
  EXPECT_LT((mean - expected).norm(), 0.05 * expected.norm()) << ModeName(mode);
}

TEST(Dlt, NoiseTemplateMatchesMonteCarloExpectation) {
  const Data d = MakeData(8, 8, 10);
  CheckExpectation(d, DltMode::kPoint, 0.01);
  CheckExpectation(d, DltMode::kLine, 0.01);
  CheckExpectation(d, DltMode::kCombined, 0.01);
}

}  // namespace
}  // namespace aopnpl
