#include <gtest/gtest.h>

#include <cstdlib>

#include "aopnpl/bench.hpp"
#include "aopnpl/estimator.hpp"
#include "aopnpl/synth.hpp"

namespace aopnpl {
namespace {

TEST(SceneConfig, Validation) {
  SceneConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.depth_range = {0.0, 10.0};
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = SceneConfig{};
  cfg.sigma_px = -1;
  EXPECT_THROW(cfg.Validate(), Error);
  EXPECT_DOUBLE_EQ(SceneConfig{}.Sigma2(), 0.0);
}

TEST(GenerateScene, DepthsImageAndIncidence) {
  SceneConfig cfg;
  cfg.n_points = 200;
  cfg.n_lines = 100;
  std::mt19937_64 rng(1);
  const Scene s = GenerateScene(cfg, rng);
  ASSERT_EQ(s.points.size(), 200u);
  ASSERT_EQ(s.lines.size(), 100u);
  const Pose& pose = s.true_pose;
  for (const auto& c : s.points) {
    const Vec3 xc = pose.rotation * c.world + pose.translation;
    EXPECT_GE(xc.z(), 2.0 - 1e-12);
    EXPECT_LE(xc.z(), 10.0 + 1e-12);
    const Vec2 px = cfg.intrinsics.ToPixel(c.image);
    EXPECT_GE(px.x(), 0.0);
    EXPECT_LE(px.x(), 640.0);
    EXPECT_GE(px.y(), 0.0);
    EXPECT_LE(px.y(), 480.0);
    EXPECT_LT(PointResidual(pose, c).norm(), 1e-10);
  }
  for (const auto& c : s.lines) {
    EXPECT_NEAR((c.endpoint_q - c.endpoint_p).norm(), std::sqrt(3.0), 1e-9);
    EXPECT_LT(LineResidual(pose, c).norm(), 1e-10);
    EXPECT_GE((cfg.intrinsics.ToPixel(c.image_p) - cfg.intrinsics.ToPixel(c.image_q)).norm(),
              20.0 - 1e-9);
  }
}

TEST(GenerateScene, Deterministic) {
  SceneConfig cfg;
  cfg.n_lines = 30;
  std::mt19937_64 a(42), b(42);
  const Scene s1 = GenerateScene(cfg, a);
  const Scene s2 = GenerateScene(cfg, b);
  for (std::size_t i = 0; i < s1.points.size(); ++i) {
    EXPECT_EQ(s1.points[i].world, s2.points[i].world);
    EXPECT_EQ(s1.points[i].image, s2.points[i].image);
  }
  for (std::size_t j = 0; j < s1.lines.size(); ++j) {
    EXPECT_EQ(s1.lines[j].world.moment, s2.lines[j].world.moment);
    EXPECT_EQ(s1.lines[j].image_q, s2.lines[j].image_q);
  }
}

TEST(GenerateScene, NoiseFreeRecovery) {
  SceneConfig cfg;
  std::mt19937_64 rng(3);
  const Scene s = GenerateScene(cfg, rng);
  const FirstStepResult r = ConsistentEstimate(s.points, s.lines);
  EXPECT_LT((r.pose.rotation - s.true_pose.rotation).norm(), 1e-6);
  EXPECT_LT((r.pose.translation - s.true_pose.translation).norm(), 1e-6);
}

TEST(AddNoise, ZeroIsIdentity) {
  SceneConfig cfg;
  cfg.n_lines = 10;
  std::mt19937_64 rng(4);
  Scene s = GenerateScene(cfg, rng);
  const Scene before = s;
  AddNoise(s.points, s.lines, 0.0, cfg.intrinsics, rng);
  for (std::size_t i = 0; i < s.points.size(); ++i) EXPECT_EQ(s.points[i].image, before.points[i].image);
  EXPECT_THROW(AddNoise(s.points, s.lines, -1.0, cfg.intrinsics, rng), Error);
}

TEST(AddNoise, SampleStatistics) {
  const CameraIntrinsics k = CameraIntrinsics::FromFocal(800, 320, 240);
  const int n = 50000;  // 1e5 scalar draws per axis pair
  const Vec2 p0(0.1, -0.2);
  std::vector<PointCorrespondence> pts(n, {Vec3(0, 0, 1), Vec2::Zero()});
  std::vector<LineCorrespondence> lines(
      n, LineCorrespondence::Make(Vec3(0, 0, 2), Vec3(1, 0, 2), p0, Vec2(0.5, 0.0)));
  std::mt19937_64 rng(5);
  AddNoise(pts, lines, 4.0, k, rng);
  const double target = 4.0 / 800.0;
  double s2 = 0, cross = 0;
  for (int i = 0; i < n; ++i) {
    s2 += pts[i].image.squaredNorm() + (lines[i].image_p - p0).squaredNorm();
    cross += pts[i].image.x() * (lines[i].image_p - p0).x();
  }
  const double std_hat = std::sqrt(s2 / (4.0 * n));
  EXPECT_NEAR(std_hat / target, 1.0, 0.01);
  const double corr = cross / n / (target * target);
  EXPECT_LT(std::abs(corr), 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(TrialSeed, DistinctStreams) {
  EXPECT_NE(TrialSeed(1, 0), TrialSeed(1, 1));
  EXPECT_NE(TrialSeed(1, 0), TrialSeed(2, 0));
  EXPECT_EQ(TrialSeed(7, 3), TrialSeed(7, 3));
}

TEST(Variants, NamesRoundTrip) {
  for (Variant v : {Variant::kFirstStepNoBe, Variant::kFirstStepBe, Variant::kTwoStep,
                    Variant::kOracleSigma, Variant::kConvergedGn}) {
    EXPECT_EQ(ParseVariant(VariantName(v)), v);
  }
  EXPECT_THROW(ParseVariant("nope"), Error);
}

TEST(MonteCarlo, NoiseFreeSingleTrial) {
  MonteCarloConfig mc;
  mc.k_trials = 1;
  mc.variants = {Variant::kFirstStepNoBe, Variant::kFirstStepBe, Variant::kTwoStep,
                 Variant::kConvergedGn};
  const MonteCarloResult r = RunMonteCarlo(mc);
  for (const TrialMetrics& m : r.summary) {
    EXPECT_LT(m.mse_r, 1e-12);
    EXPECT_LT(m.mse_t, 1e-12);
    EXPECT_EQ(m.failures, 0);
  }
  mc.k_trials = 0;
  EXPECT_THROW(RunMonteCarlo(mc), Error);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  MonteCarloConfig mc;
  mc.scene.n_points = 40;
  mc.scene.n_lines = 30;
  mc.scene.sigma_px = 3.0;
  mc.k_trials = 30;
  mc.variants = {Variant::kFirstStepBe, Variant::kTwoStep, Variant::kOracleSigma};
  mc.threads = 1;
  const MonteCarloResult a = RunMonteCarlo(mc);
  mc.threads = 3;
  const MonteCarloResult b = RunMonteCarlo(mc);
  for (std::size_t v = 0; v < a.summary.size(); ++v) {
    EXPECT_EQ(a.summary[v].mse_r, b.summary[v].mse_r);
    EXPECT_EQ(a.summary[v].mse_t, b.summary[v].mse_t);
    EXPECT_EQ(a.summary[v].bias_r, b.summary[v].bias_r);
    EXPECT_EQ(a.summary[v].sigma2_mse, b.summary[v].sigma2_mse);
    EXPECT_EQ(a.summary[v].crb_trace, b.summary[v].crb_trace);
    EXPECT_GE(a.summary[v].mse_r, 0.0);
    EXPECT_GE(a.summary[v].crb_trace, 0.0);
  }
}

TEST(MonteCarlo, FailuresAreCounted) {
  MonteCarloConfig mc;
  mc.scene.n_points = 3;  // below every dispatcher case
  mc.k_trials = 5;
  mc.compute_crb = false;
  const MonteCarloResult r = RunMonteCarlo(mc);
  for (const TrialMetrics& m : r.summary) {
    EXPECT_EQ(m.failures, 5);
    EXPECT_EQ(m.successes, 0);
    EXPECT_EQ(m.mse_r, 0.0);
  }
}

TEST(MonteCarlo, TwoStepNotWorseOverGrid) {
  int violations = 0;
  for (int n : {10, 30, 100, 300, 1000}) {
    MonteCarloConfig mc;
    mc.scene.n_points = mc.scene.n_lines = n;
    mc.scene.sigma_px = 5.0;
    mc.scene.seed = 20 + n;
    mc.k_trials = 100;
    mc.variants = {Variant::kFirstStepBe, Variant::kTwoStep};
    mc.compute_crb = false;
    const MonteCarloResult r = RunMonteCarlo(mc);
    if (r.summary[1].mse_r + r.summary[1].mse_t > r.summary[0].mse_r + r.summary[0].mse_t) {
      ++violations;
    }
  }
  EXPECT_LE(violations, 1);
}

TEST(LogLogSlope, ExactPowerLaw) {
  const std::vector<double> x{1, 10, 100}, y{2, 0.2, 0.02};
  EXPECT_NEAR(LogLogSlope(x, y), -1.0, 1e-12);
  EXPECT_THROW(LogLogSlope(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
}

TEST(Runtime, RejectsUnsortedGrid) {
  const std::vector<int> grid{100, 50};
  EXPECT_THROW(MeasureRuntimeScaling(SceneConfig{}, grid, SizeMode::kPoints), Error);
}

TEST(Runtime, FourfoldSizeCostsAboutFourfoldTime) {
  SceneConfig base;
  base.sigma_px = 5.0;
  const std::vector<int> grid{1000, 4000};
  const RuntimeScaling rs = MeasureRuntimeScaling(base, grid, SizeMode::kPoints, 5);
  const double ratio = rs.points[1].seconds / rs.points[0].seconds;
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.5);
}

TEST(Runtime, MedianOfFiveIsStable) {
  SceneConfig base;
  base.sigma_px = 5.0;
  const std::vector<int> grid{1000};
  const double a = MeasureRuntimeScaling(base, grid, SizeMode::kBoth, 5).points[0].seconds;
  const double b = MeasureRuntimeScaling(base, grid, SizeMode::kBoth, 5).points[0].seconds;
  EXPECT_LT(std::abs(a - b) / std::min(a, b), 0.3);
}

TEST(Bench, CsvShape) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::kVariance;
  cfg.grid = {10, 30, 100};
  cfg.k_trials = 10;
  const BenchOutput out = RunExperiment(cfg);
  EXPECT_EQ(out.rows.size(), 3u);
  const std::string csv = ToCsv(out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "size_n,size_m,sigma_px,variant,mse_r,mse_t,bias_r,bias_t,sigma2_mse,crb_trace,"
            "time_s,failures");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(ToCsv(RunExperiment(cfg)), csv);
}

TEST(Bench, Defaults) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::kMse;
  EXPECT_EQ(cfg.ResolvedGrid(), (std::vector<int>{10, 30, 100, 300, 1000}));
  cfg.experiment = Experiment::kRuntime;
  EXPECT_EQ(cfg.ResolvedGrid(), (std::vector<int>{250, 1000, 4000}));
  EXPECT_THROW(ParseExperiment("x"), Error);
  EXPECT_EQ(ParseSizeMode("line"), SizeMode::kLines);
}

}  // namespace
}  // namespace aopnpl
