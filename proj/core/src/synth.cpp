#include "aopnpl/synth.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include "aopnpl/crb.hpp"
#include "aopnpl/estimator.hpp"

namespace aopnpl {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

Vec3 LiftToWorld(const SceneConfig& cfg, const Pose& pose, const Vec2& px, double depth) {
  const Vec2 x = cfg.intrinsics.Normalize(px);
  const Vec3 xc = depth * Homogeneous(x);
  return pose.rotation.transpose() * (xc - pose.translation);
}

}  // namespace

Pose SceneConfig::TruePose() const {
  return Pose{RotationFromEuler(euler_angles), translation};
}

double SceneConfig::Sigma2() const {
  return NoiseModel::FromPixels(sigma_px, intrinsics).sigma2;
}

void SceneConfig::Validate() const {
  if (n_points < 0 || n_lines < 0) {
    throw Error(ErrorCode::kInvalidArgument, "counts must be non-negative");
  }
  if (!(depth_range.first > 0.0) || depth_range.second < depth_range.first) {
    throw Error(ErrorCode::kInvalidArgument, "depth range must satisfy 0 < min <= max");
  }
  if (!(sigma_px >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_px must be non-negative");
  }
  if (image_size.first <= 0 || image_size.second <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  const double diag = std::hypot(image_size.first, image_size.second);
  if (n_lines > 0 && min_line_separation_px >= diag) {
    throw Error(ErrorCode::kInvalidArgument, "line separation exceeds the image diagonal");
  }
}

Scene GenerateScene(const SceneConfig& cfg, std::mt19937_64& rng) {
  cfg.Validate();
  Scene scene;
  scene.true_pose = cfg.TruePose();
  std::uniform_real_distribution<double> ux(0.0, cfg.image_size.first);
  std::uniform_real_distribution<double> uy(0.0, cfg.image_size.second);
  std::uniform_real_distribution<double> udepth(cfg.depth_range.first, cfg.depth_range.second);

  scene.points.reserve(cfg.n_points);
  for (int i = 0; i < cfg.n_points; ++i) {
    const Vec2 px(ux(rng), uy(rng));
    const double depth = udepth(rng);
    scene.points.push_back(
        {LiftToWorld(cfg, scene.true_pose, px, depth), cfg.intrinsics.Normalize(px)});
  }

  scene.lines.reserve(cfg.n_lines);
  for (int j = 0; j < cfg.n_lines; ++j) {
    Vec2 p_px;
    Vec2 q_px;
    do {
      p_px = Vec2(ux(rng), uy(rng));
      q_px = Vec2(ux(rng), uy(rng));
    } while ((p_px - q_px).norm() < cfg.min_line_separation_px);
    const double dp = udepth(rng);
    const double dq = udepth(rng);
    scene.lines.push_back(LineCorrespondence::Make(
        LiftToWorld(cfg, scene.true_pose, p_px, dp), LiftToWorld(cfg, scene.true_pose, q_px, dq),
        cfg.intrinsics.Normalize(p_px), cfg.intrinsics.Normalize(q_px)));
  }
  return scene;
}

void AddNoise(std::span<PointCorrespondence> points, std::span<LineCorrespondence> lines,
              double sigma_px, const CameraIntrinsics& k, std::mt19937_64& rng) {
  if (!(sigma_px >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_px must be non-negative");
  }
  if (sigma_px == 0.0) return;
  // Same standard deviation on both axes in normalized units, as fx = fy
  // for the cameras this is used with; fy is honoured if it differs.
  std::normal_distribution<double> nx(0.0, sigma_px / k.fx());
  std::normal_distribution<double> ny(0.0, sigma_px / k.fy());
  for (auto& c : points) {
    c.image += Vec2(nx(rng), ny(rng));
  }
  for (auto& c : lines) {
    c.image_p += Vec2(nx(rng), ny(rng));
    c.image_q += Vec2(nx(rng), ny(rng));
  }
}

std::uint64_t TrialSeed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over (master, index)
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int ResolveThreadCount(int requested) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int n = requested > 0 ? requested : hw;
  if (const char* env = std::getenv("AOPNPL_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kFirstStepNoBe: return "first-step-no-be";
    case Variant::kFirstStepBe: return "first-step-be";
    case Variant::kTwoStep: return "two-step";
    case Variant::kOracleSigma: return "oracle-sigma";
    case Variant::kConvergedGn: return "converged-gn";
  }
  return "unknown";
}

Variant ParseVariant(std::string_view name) {
  for (Variant v : {Variant::kFirstStepNoBe, Variant::kFirstStepBe, Variant::kTwoStep,
                    Variant::kOracleSigma, Variant::kConvergedGn}) {
    if (VariantName(v) == name) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + std::string(name) + "'");
}

namespace {

TrialRecord RunTrial(const MonteCarloConfig& cfg, int index) {
  std::mt19937_64 rng(TrialSeed(cfg.scene.seed, static_cast<std::uint64_t>(index)));
  Scene scene = GenerateScene(cfg.scene, rng);
  const double sigma2 = cfg.scene.Sigma2();

  TrialRecord rec;
  if (cfg.compute_crb && sigma2 > 0.0) {
    try {
      const CrbResult crb = ComputeCrb(scene.true_pose, scene.points, scene.lines, sigma2);
      rec.crb_trace = crb.trace_bound;
      rec.crb_rotation = crb.rotation_trace;
      rec.crb_translation = crb.translation_trace;
    } catch (const Error&) {
      rec.crb_trace = std::numeric_limits<double>::quiet_NaN();
    }
  }
  AddNoise(scene.points, scene.lines, cfg.scene.sigma_px, cfg.scene.intrinsics, rng);

  EstimatorConfig be_cfg;
  be_cfg.split_variance = cfg.split_variance;
  be_cfg.gn_iterations = 0;

  // The BE first step is shared by several variants; compute it once.
  std::optional<FirstStepResult> be;
  double be_seconds = 0.0;
  std::optional<Error> be_error;
  auto ensure_be = [&] {
    if (be || be_error) return;
    const auto t0 = Clock::now();
    try {
      be = ConsistentEstimate(scene.points, scene.lines, be_cfg);
    } catch (const Error& e) {
      be_error = e;
    }
    be_seconds = Seconds(t0, Clock::now());
  };

  for (Variant v : cfg.variants) {
    VariantOutcome out;
    try {
      switch (v) {
        case Variant::kFirstStepNoBe: {
          EstimatorConfig c = be_cfg;
          c.bias_elimination = false;
          const auto t0 = Clock::now();
          const FirstStepResult fs = ConsistentEstimate(scene.points, scene.lines, c);
          out.seconds = Seconds(t0, Clock::now());
          out.pose = fs.pose;
          out.sigma2_hat = fs.variance.sigma2_hat;
          break;
        }
        case Variant::kFirstStepBe:
        case Variant::kTwoStep:
        case Variant::kConvergedGn: {
          ensure_be();
          if (be_error) throw *be_error;
          const int iters = v == Variant::kFirstStepBe  ? 0
                            : v == Variant::kTwoStep    ? 1
                                                        : cfg.converged_iterations;
          const auto t0 = Clock::now();
          const EstimateReport rep = Refine(*be, scene.points, scene.lines, iters);
          out.seconds = be_seconds + Seconds(t0, Clock::now());
          out.pose = rep.refined;
          out.sigma2_hat = be->variance.sigma2_hat;
          break;
        }
        case Variant::kOracleSigma: {
          EstimatorConfig c = be_cfg;
          c.sigma2_override = sigma2;
          c.gn_iterations = 1;
          const auto t0 = Clock::now();
          const EstimateReport rep = Estimate(scene.points, scene.lines, c);
          out.seconds = Seconds(t0, Clock::now());
          out.pose = rep.refined;
          out.sigma2_hat = sigma2;
          break;
        }
      }
      out.ok = true;
    } catch (const Error& e) {
      out.ok = false;
      out.error = e.code();
    }
    rec.outcomes.push_back(out);
  }
  return rec;
}

}  // namespace

TrialMetrics Summarize(const MonteCarloResult& result, std::size_t variant_index) {
  const Pose truth = result.config.scene.TruePose();
  const double sigma2 = result.config.scene.Sigma2();
  TrialMetrics m;
  Mat3 mean_r = Mat3::Zero();
  Vec3 mean_t = Vec3::Zero();
  double crb_sum = 0.0;
  int crb_count = 0;
  // Sequential in trial order so sums are bit-stable.
  for (const TrialRecord& rec : result.trials) {
    const VariantOutcome& o = rec.outcomes[variant_index];
    if (!o.ok) {
      ++m.failures;
      continue;
    }
    ++m.successes;
    m.mse_r += (o.pose.rotation - truth.rotation).squaredNorm();
    m.mse_t += (o.pose.translation - truth.translation).squaredNorm();
    m.sigma2_mse += (o.sigma2_hat - sigma2) * (o.sigma2_hat - sigma2);
    m.wall_time += o.seconds;
    mean_r += o.pose.rotation;
    mean_t += o.pose.translation;
    if (std::isfinite(rec.crb_trace)) {
      crb_sum += rec.crb_trace;
      ++crb_count;
    }
  }
  if (m.successes > 0) {
    const double k = m.successes;
    m.mse_r /= k;
    m.mse_t /= k;
    m.sigma2_mse /= k;
    m.wall_time /= k;
    m.bias_r = (mean_r / k - truth.rotation).cwiseAbs().sum();
    m.bias_t = (mean_t / k - truth.translation).cwiseAbs().sum();
  }
  m.crb_trace = crb_count > 0 ? crb_sum / crb_count : 0.0;
  return m;
}

MonteCarloResult RunMonteCarlo(const MonteCarloConfig& cfg) {
  if (cfg.k_trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k_trials must be at least 1");
  }
  cfg.scene.Validate();
  MonteCarloResult result;
  result.config = cfg;
  result.trials.resize(cfg.k_trials);

  const int workers = std::min(ResolveThreadCount(cfg.threads), cfg.k_trials);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < cfg.k_trials; k = next++) {
      result.trials[k] = RunTrial(cfg, k);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
    result.summary.push_back(Summarize(result, v));
  }
  return result;
}

double TimeSolve(const Scene& scene, double min_seconds) {
  int calls = 0;
  const auto t0 = Clock::now();
  double elapsed = 0.0;
  do {
    const EstimateReport rep = Estimate(scene.points, scene.lines);
    // Keep the result observable so the call is not optimized out.
    if (!std::isfinite(rep.refined.translation.x())) break;
    ++calls;
    elapsed = Seconds(t0, Clock::now());
  } while (elapsed < min_seconds);
  return elapsed / std::max(calls, 1);
}

double LogLogSlope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "slope needs two or more paired samples");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RuntimeScaling MeasureRuntimeScaling(const SceneConfig& base, std::span<const int> sizes,
                                     SizeMode mode, int repeats) {
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  RuntimeScaling out;
  std::vector<double> xs;
  std::vector<double> ys;
  int prev = 0;
  for (int size : sizes) {
    if (size <= prev) {
      throw Error(ErrorCode::kInvalidArgument, "runtime grid must be strictly ascending");
    }
    prev = size;
    SceneConfig cfg = base;
    cfg.n_points = mode == SizeMode::kLines ? 0 : size;
    cfg.n_lines = mode == SizeMode::kPoints ? 0 : size;
    std::mt19937_64 rng(TrialSeed(base.seed, static_cast<std::uint64_t>(size)));
    Scene scene = GenerateScene(cfg, rng);
    AddNoise(scene.points, scene.lines, cfg.sigma_px, cfg.intrinsics, rng);
    std::vector<double> times;
    for (int r = 0; r < repeats; ++r) times.push_back(TimeSolve(scene));
    std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
    const double median = times[times.size() / 2];
    out.points.push_back({size, median});
    xs.push_back(size);
    ys.push_back(median);
  }
  if (xs.size() >= 2) out.slope = LogLogSlope(xs, ys);
  return out;
}

}  // namespace aopnpl
