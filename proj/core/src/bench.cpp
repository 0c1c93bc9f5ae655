#include "aopnpl/bench.hpp"

#include <cstdio>
#include <string>

#include "aopnpl/error.hpp"

namespace aopnpl {

std::string_view ExperimentName(Experiment e) {
  switch (e) {
    case Experiment::kVariance: return "variance";
    case Experiment::kBias: return "bias";
    case Experiment::kMse: return "mse";
    case Experiment::kRuntime: return "runtime";
  }
  return "unknown";
}

Experiment ParseExperiment(std::string_view name) {
  for (Experiment e : {Experiment::kVariance, Experiment::kBias, Experiment::kMse,
                       Experiment::kRuntime}) {
    if (ExperimentName(e) == name) return e;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown experiment '" + std::string(name) + "'");
}

std::string_view SizeModeName(SizeMode m) {
  switch (m) {
    case SizeMode::kPoints: return "point";
    case SizeMode::kLines: return "line";
    case SizeMode::kBoth: return "combined";
  }
  return "unknown";
}

SizeMode ParseSizeMode(std::string_view name) {
  for (SizeMode m : {SizeMode::kPoints, SizeMode::kLines, SizeMode::kBoth}) {
    if (SizeModeName(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + std::string(name) + "'");
}

std::vector<int> ExperimentConfig::ResolvedGrid() const {
  if (!grid.empty()) return grid;
  switch (experiment) {
    case Experiment::kBias: return {1000};
    case Experiment::kRuntime: return {250, 1000, 4000};
    default: return {10, 30, 100, 300, 1000};
  }
}

double ExperimentConfig::ResolvedSigmaPx() const {
  if (sigma_px) return *sigma_px;
  return experiment == Experiment::kMse || experiment == Experiment::kRuntime ? 5.0 : 10.0;
}

std::vector<Variant> ExperimentConfig::ResolvedVariants() const {
  switch (experiment) {
    case Experiment::kVariance: return {Variant::kFirstStepBe};
    case Experiment::kBias: return {Variant::kFirstStepNoBe, Variant::kFirstStepBe};
    case Experiment::kRuntime: return {Variant::kTwoStep};
    case Experiment::kMse: {
      std::vector<Variant> v{Variant::kFirstStepBe, Variant::kTwoStep};
      if (include_oracle) v.push_back(Variant::kOracleSigma);
      return v;
    }
  }
  return {};
}

void ExperimentConfig::Validate() const {
  if (k_trials < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (runtime_repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  if (!(ResolvedSigmaPx() >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_px must be non-negative");
  }
  int prev = 0;
  for (int s : ResolvedGrid()) {
    if (s <= 0) throw Error(ErrorCode::kInvalidArgument, "grid sizes must be positive");
    if (experiment == Experiment::kRuntime && s <= prev) {
      throw Error(ErrorCode::kInvalidArgument, "runtime grid must be strictly ascending");
    }
    prev = s;
  }
}

namespace {

SceneConfig SceneFor(const ExperimentConfig& cfg, int size) {
  SceneConfig s;
  s.n_points = cfg.mode == SizeMode::kLines ? 0 : size;
  s.n_lines = cfg.mode == SizeMode::kPoints ? 0 : size;
  s.sigma_px = cfg.ResolvedSigmaPx();
  s.seed = TrialSeed(cfg.seed, static_cast<std::uint64_t>(size));
  return s;
}

}  // namespace

BenchOutput RunExperiment(const ExperimentConfig& cfg) {
  cfg.Validate();
  BenchOutput out;
  out.config = cfg;
  const std::vector<int> grid = cfg.ResolvedGrid();

  if (cfg.experiment == Experiment::kRuntime) {
    SceneConfig base = SceneFor(cfg, 0);
    base.seed = cfg.seed;
    const RuntimeScaling rs = MeasureRuntimeScaling(base, grid, cfg.mode, cfg.runtime_repeats);
    for (const RuntimePoint& p : rs.points) {
      BenchRow row;
      row.size_n = cfg.mode == SizeMode::kLines ? 0 : p.size;
      row.size_m = cfg.mode == SizeMode::kPoints ? 0 : p.size;
      row.sigma_px = base.sigma_px;
      row.variant = Variant::kTwoStep;
      row.metrics.wall_time = p.seconds;
      row.metrics.successes = cfg.runtime_repeats;
      row.time_s = p.seconds;
      out.rows.push_back(row);
    }
    out.runtime_slope = rs.slope;
    return out;
  }

  for (int size : grid) {
    MonteCarloConfig mc;
    mc.scene = SceneFor(cfg, size);
    mc.k_trials = cfg.k_trials;
    mc.variants = cfg.ResolvedVariants();
    mc.compute_crb = cfg.experiment == Experiment::kMse;
    mc.threads = cfg.threads;
    const MonteCarloResult res = RunMonteCarlo(mc);
    for (std::size_t v = 0; v < mc.variants.size(); ++v) {
      BenchRow row;
      row.size_n = mc.scene.n_points;
      row.size_m = mc.scene.n_lines;
      row.sigma_px = mc.scene.sigma_px;
      row.variant = mc.variants[v];
      row.metrics = res.summary[v];
      row.time_s = cfg.timing ? row.metrics.wall_time : 0.0;
      out.rows.push_back(row);
    }
  }
  return out;
}

std::string CsvHeader() {
  return "size_n,size_m,sigma_px,variant,mse_r,mse_t,bias_r,bias_t,sigma2_mse,crb_trace,"
         "time_s,failures";
}

std::string CsvRow(const BenchRow& r) {
  char buf[512];
  const TrialMetrics& m = r.metrics;
  std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d",
                r.size_n, r.size_m, r.sigma_px, std::string(VariantName(r.variant)).c_str(),
                m.mse_r, m.mse_t, m.bias_r, m.bias_t, m.sigma2_mse, m.crb_trace, r.time_s,
                m.failures);
  return buf;
}

std::string ToCsv(const BenchOutput& out) {
  std::string s = CsvHeader() + "\n";
  for (const BenchRow& r : out.rows) s += CsvRow(r) + "\n";
  return s;
}

}  // namespace aopnpl
