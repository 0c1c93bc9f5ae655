#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "aopnpl/camera.hpp"
#include "aopnpl/error.hpp"
#include "aopnpl/solver.hpp"

namespace aopnpl {

struct SceneConfig {
  int n_points = 100;
  int n_lines = 0;
  double sigma_px = 0.0;
  Vec3 euler_angles = Vec3::Constant(std::numbers::pi / 3.0);
  Vec3 translation = Vec3::Constant(2.0);
  CameraIntrinsics intrinsics = CameraIntrinsics::FromFocal(800.0, 320.0, 240.0);
  std::pair<double, double> depth_range{2.0, 10.0};
  std::pair<int, int> image_size{640, 480};
  double min_line_separation_px = 20.0;
  std::uint64_t seed = 1;

  Pose TruePose() const;
  /// Noise variance in squared normalized units.
  double Sigma2() const;
  void Validate() const;
};

struct Scene {
  std::vector<PointCorrespondence> points;
  std::vector<LineCorrespondence> lines;
  Pose true_pose;
};

/// Draws image points uniformly over the image, lifts them with uniform
/// depths and maps them to the world frame with the true pose. Line
/// endpoints are lifted independently and then normalized in 3D.
/// Observations are exact.
Scene GenerateScene(const SceneConfig& cfg, std::mt19937_64& rng);

/// Adds i.i.d. N(0, (sigma_px / fx)^2 I2) to every image point and endpoint.
void AddNoise(std::span<PointCorrespondence> points, std::span<LineCorrespondence> lines,
              double sigma_px, const CameraIntrinsics& k, std::mt19937_64& rng);

/// Independent, reproducible seed for trial `index`.
std::uint64_t TrialSeed(std::uint64_t master, std::uint64_t index);

/// Worker count for trial-parallel loops: AOPNPL_THREADS if set, otherwise
/// the hardware concurrency.
int ResolveThreadCount(int requested = 0);

enum class Variant {
  kFirstStepNoBe,
  kFirstStepBe,
  kTwoStep,
  kOracleSigma,   // two-step with the true variance
  kConvergedGn,   // first step followed by GN run to convergence
};

std::string_view VariantName(Variant v);
Variant ParseVariant(std::string_view name);

struct TrialMetrics {
  double mse_r = 0.0;
  double mse_t = 0.0;
  double bias_r = 0.0;
  double bias_t = 0.0;
  double sigma2_mse = 0.0;
  double crb_trace = 0.0;
  double wall_time = 0.0;  // mean seconds per successful trial
  int successes = 0;
  int failures = 0;
};

struct VariantOutcome {
  bool ok = false;
  Pose pose;
  double sigma2_hat = 0.0;
  double seconds = 0.0;
  ErrorCode error = ErrorCode::kInvalidArgument;
};

struct TrialRecord {
  std::vector<VariantOutcome> outcomes;  // parallel to MonteCarloConfig::variants
  double crb_trace = 0.0;
  double crb_rotation = 0.0;
  double crb_translation = 0.0;
};

struct MonteCarloConfig {
  SceneConfig scene;
  int k_trials = 200;
  std::vector<Variant> variants{Variant::kFirstStepNoBe, Variant::kFirstStepBe,
                                Variant::kTwoStep};
  bool compute_crb = true;
  bool split_variance = false;
  int converged_iterations = 50;
  int threads = 0;
};

struct MonteCarloResult {
  MonteCarloConfig config;
  std::vector<TrialRecord> trials;
  std::vector<TrialMetrics> summary;  // parallel to config.variants
};

/// Runs k_trials independent scenes; trial k uses TrialSeed(seed, k), so the
/// result does not depend on the thread count. Estimator failures are
/// counted per variant and excluded from the statistics.
MonteCarloResult RunMonteCarlo(const MonteCarloConfig& cfg);

/// Aggregates one variant column of a finished run.
TrialMetrics Summarize(const MonteCarloResult& result, std::size_t variant_index);

enum class SizeMode { kPoints, kLines, kBoth };

struct RuntimePoint {
  int size = 0;
  double seconds = 0.0;  // median seconds per two-step solve
};

struct RuntimeScaling {
  std::vector<RuntimePoint> points;
  double slope = 0.0;  // least-squares slope of log(seconds) vs log(size)
};

/// Seconds per call of the two-step estimator on `scene`, averaged over
/// enough back-to-back calls to fill `min_seconds`.
double TimeSolve(const Scene& scene, double min_seconds = 0.02);

RuntimeScaling MeasureRuntimeScaling(const SceneConfig& base, std::span<const int> sizes,
                                     SizeMode mode, int repeats = 5);

/// Slope of the least-squares line through (log x, log y).
double LogLogSlope(std::span<const double> x, std::span<const double> y);

}  // namespace aopnpl
