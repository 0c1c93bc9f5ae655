#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aopnpl/bench.hpp"
#include "aopnpl/crb.hpp"
#include "aopnpl/estimator.hpp"
#include "correspondence_file.hpp"

namespace {

using nlohmann::json;
using namespace aopnpl;

constexpr int kExitParse = 2;
constexpr int kExitUnderdetermined = 3;
constexpr int kExitNumerical = 4;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnderdetermined:
    case ErrorCode::kInsufficientCorrespondences:
      return kExitUnderdetermined;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kSingularIntrinsics:
    case ErrorCode::kDegenerateLine:
      return kExitParse;
    default:
      return kExitNumerical;
  }
}

int ReportError(int exit_code, std::string_view kind, const std::string& message) {
  json err{{"error", kind}, {"message", message}, {"exit_code", exit_code}};
  std::cerr << err.dump() << "\n";
  return exit_code;
}

int ReportError(const Error& e) {
  return ReportError(ExitCodeFor(e.code()), ErrorCodeName(e.code()), e.what());
}

void Emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + out_path + "'");
  out << j.dump(2) << "\n";
}

json DiagnosticsJson(const EstimateReport& rep, const io::CorrespondenceFile& f) {
  const FirstStepResult& fs = rep.first_step;
  json d{{"n_points", f.points.size()},
         {"n_lines", f.lines.size()},
         {"scale_s", fs.recovery.scale_s},
         {"sign_d", fs.recovery.sign_d},
         {"smallest_eig", fs.recovery.smallest_eig},
         {"eig_gap", fs.recovery.eig_gap},
         {"lambda_max", fs.variance.lambda_max},
         {"sigma2_clamped", fs.variance.clamped},
         {"gram_regularized", fs.variance.regularized},
         {"refined", rep.refined_applied},
         {"gn_iterations", rep.gn.iterations},
         {"gn_condition", rep.gn.condition}};
  if (fs.split) {
    d["sigma2_point"] = fs.sigma2_point;
    d["sigma2_line"] = fs.sigma2_line;
  }
  if (f.ground_truth) {
    const Pose& gt = *f.ground_truth;
    d["rotation_error"] = (rep.refined.rotation - gt.rotation).norm();
    d["translation_error"] = (rep.refined.translation - gt.translation).norm();
    d["first_step_rotation_error"] = (fs.pose.rotation - gt.rotation).norm();
    d["first_step_translation_error"] = (fs.pose.translation - gt.translation).norm();
  }
  return d;
}

struct SolveArgs {
  std::string input;
  bool no_refine = false;
  std::optional<double> sigma2;
  bool split = false;
  std::string out;
};

int RunSolve(const SolveArgs& a) {
  const io::CorrespondenceFile f = io::LoadCorrespondenceFile(a.input);
  EstimatorConfig cfg;
  cfg.gn_iterations = a.no_refine ? 0 : 1;
  cfg.sigma2_override = a.sigma2;
  cfg.split_variance = a.split;
  const EstimateReport rep = Estimate(f.points, f.lines, cfg);
  json out = io::PoseToJson(rep.refined);
  out["sigma2_hat"] = rep.sigma2_hat();
  out["mode"] = std::string(ModeName(rep.first_step.mode));
  out["first_step_pose"] = io::PoseToJson(rep.first_step.pose);
  out["diagnostics"] = DiagnosticsJson(rep, f);
  Emit(out, a.out);
  return 0;
}

std::vector<int> ParseGrid(const std::string& csv) {
  std::vector<int> grid;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "bad grid entry '" + item + "'");
    }
    grid.push_back(v);
  }
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty grid");
  return grid;
}

json ConfigJson(const ExperimentConfig& c) {
  return {{"experiment", ExperimentName(c.experiment)},
          {"grid", c.ResolvedGrid()},
          {"k", c.k_trials},
          {"sigma_px", c.ResolvedSigmaPx()},
          {"seed", c.seed},
          {"mode", SizeModeName(c.mode)},
          {"include_oracle", c.include_oracle},
          {"timing", c.timing},
          {"scene",
           {{"euler_angles", {SceneConfig{}.euler_angles.x(), SceneConfig{}.euler_angles.y(),
                              SceneConfig{}.euler_angles.z()}},
            {"translation", {2.0, 2.0, 2.0}},
            {"intrinsics", io::MatrixToJson(SceneConfig{}.intrinsics.matrix())},
            {"depth_range", {SceneConfig{}.depth_range.first, SceneConfig{}.depth_range.second}},
            {"image_size", {SceneConfig{}.image_size.first, SceneConfig{}.image_size.second}},
            {"min_line_separation_px", SceneConfig{}.min_line_separation_px}}}};
}

json BenchJson(const BenchOutput& out) {
  json rows = json::array();
  for (const BenchRow& r : out.rows) {
    const TrialMetrics& m = r.metrics;
    rows.push_back({{"size_n", r.size_n},
                    {"size_m", r.size_m},
                    {"sigma_px", r.sigma_px},
                    {"variant", VariantName(r.variant)},
                    {"mse_r", m.mse_r},
                    {"mse_t", m.mse_t},
                    {"bias_r", m.bias_r},
                    {"bias_t", m.bias_t},
                    {"sigma2_mse", m.sigma2_mse},
                    {"crb_trace", m.crb_trace},
                    {"time_s", r.time_s},
                    {"successes", m.successes},
                    {"failures", m.failures}});
  }
  json j{{"config", ConfigJson(out.config)}, {"rows", rows}};
  if (out.config.experiment == Experiment::kRuntime) j["runtime_slope"] = out.runtime_slope;
  return j;
}

struct BenchArgs {
  std::string experiment = "mse";
  std::string grid;
  std::optional<int> k;
  std::optional<double> sigma_px;
  std::uint64_t seed = 1;
  std::string out;
  std::string mode = "combined";
  bool timing = false;
  bool full = false;
  bool oracle = false;
};

int RunBench(const BenchArgs& a) {
  ExperimentConfig cfg;
  cfg.experiment = ParseExperiment(a.experiment);
  cfg.mode = ParseSizeMode(a.mode);
  if (!a.grid.empty()) cfg.grid = ParseGrid(a.grid);
  cfg.k_trials = a.k ? *a.k : (a.full ? 1000 : 200);
  cfg.sigma_px = a.sigma_px;
  cfg.seed = a.seed;
  cfg.timing = a.timing;
  cfg.include_oracle = a.oracle;
  cfg.Validate();

  const BenchOutput out = RunExperiment(cfg);
  const std::string csv = ToCsv(out);
  if (a.out.empty()) {
    std::cout << csv;
    return 0;
  }
  std::filesystem::create_directories(a.out);
  const std::string stem = (std::filesystem::path(a.out) / a.experiment).string();
  std::ofstream(stem + ".csv") << csv;
  std::ofstream(stem + ".json") << BenchJson(out).dump(2) << "\n";
  std::cout << stem << ".csv\n" << stem << ".json\n";
  return 0;
}

Pose ParsePoseArg(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("bad pose file: ") + e.what());
    }
    if (j.contains("ground_truth")) return io::PoseFromJson(j.at("ground_truth"));
    return io::PoseFromJson(j);
  }
  // Inline: 9 row-major rotation entries followed by 3 translation entries.
  std::vector<double> v;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad pose entry '" + item + "'");
    }
  }
  if (v.size() != 12) {
    throw Error(ErrorCode::kInvalidArgument,
                "inline pose needs 12 comma-separated numbers (R row-major, t)");
  }
  json j{{"rotation", std::vector<double>(v.begin(), v.begin() + 9)},
         {"translation", std::vector<double>(v.begin() + 9, v.end())}};
  return io::PoseFromJson(j);
}

struct CrbArgs {
  std::string input;
  std::string pose;
  double sigma_px = 1.0;
  std::string out;
};

int RunCrb(const CrbArgs& a) {
  const io::CorrespondenceFile f = io::LoadCorrespondenceFile(a.input);
  Pose pose;
  if (!a.pose.empty()) {
    pose = ParsePoseArg(a.pose);
  } else if (f.ground_truth) {
    pose = *f.ground_truth;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "no --pose given and file has no ground_truth");
  }
  if (!(a.sigma_px > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--sigma-px must be > 0");
  const double sigma2 = NoiseModel::FromPixels(a.sigma_px, f.intrinsics).sigma2;
  const CrbResult crb = ComputeCrb(pose, f.points, f.lines, sigma2);
  Emit({{"trace", crb.trace_bound},
        {"rotation_block_trace", crb.rotation_trace},
        {"translation_block_trace", crb.translation_trace},
        {"sigma_px", a.sigma_px},
        {"sigma2", sigma2}},
       a.out);
  return 0;
}

struct GenerateArgs {
  int n = 100;
  int m = 0;
  double sigma_px = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

int RunGenerate(const GenerateArgs& a) {
  SceneConfig cfg;
  cfg.n_points = a.n;
  cfg.n_lines = a.m;
  cfg.sigma_px = a.sigma_px;
  cfg.seed = a.seed;
  std::mt19937_64 rng(a.seed);
  Scene scene = GenerateScene(cfg, rng);
  AddNoise(scene.points, scene.lines, cfg.sigma_px, cfg.intrinsics, rng);
  json j = io::SceneToJson(scene, cfg.intrinsics);
  j["sigma_px"] = a.sigma_px;
  Emit(j, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistent and asymptotically efficient camera pose estimation"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Estimate the pose from a correspondence file");
  s->add_option("file", solve.input, "Correspondence JSON")->required();
  s->add_flag("--no-refine", solve.no_refine, "Stop after the consistent first step");
  s->add_option("--sigma2", solve.sigma2, "Noise variance in normalized units")
      ->check(CLI::NonNegativeNumber);
  s->add_flag("--split-variance", solve.split, "Estimate point and line noise separately");
  s->add_option("--out", solve.out, "Write JSON here instead of stdout");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run a synthetic Monte Carlo experiment");
  b->add_option("--experiment", bench.experiment, "variance | bias | mse | runtime")
      ->check(CLI::IsMember({"variance", "bias", "mse", "runtime"}));
  b->add_option("--grid", bench.grid, "Comma-separated sizes");
  b->add_option("--k", bench.k, "Trials per grid point")->check(CLI::PositiveNumber);
  b->add_option("--sigma-px", bench.sigma_px, "Pixel noise")->check(CLI::NonNegativeNumber);
  b->add_option("--seed", bench.seed, "Master seed");
  b->add_option("--out", bench.out, "Output directory for CSV and JSON");
  b->add_option("--mode", bench.mode, "point | line | combined")
      ->check(CLI::IsMember({"point", "line", "combined"}));
  b->add_flag("--timing", bench.timing, "Fill time_s (makes output run-dependent)");
  b->add_flag("--full", bench.full, "K = 1000 unless --k is given");
  b->add_flag("--oracle", bench.oracle, "Add the true-variance variant (mse experiment)");

  CrbArgs crb;
  auto* c = app.add_subcommand("crb", "Constrained Cramér-Rao bound at a given pose");
  c->add_option("file", crb.input, "Correspondence JSON")->required();
  c->add_option("--pose", crb.pose, "Pose JSON file or 12 inline numbers (R row-major, t)");
  c->add_option("--sigma-px", crb.sigma_px, "Pixel noise");
  c->add_option("--out", crb.out, "Write JSON here instead of stdout");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic correspondence file");
  g->add_option("--n", gen.n, "Points")->check(CLI::NonNegativeNumber);
  g->add_option("--m", gen.m, "Lines")->check(CLI::NonNegativeNumber);
  g->add_option("--sigma-px", gen.sigma_px, "Pixel noise")->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--out", gen.out, "Write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError(kExitParse, "ParseError", e.what());
  }

  try {
    if (*s) return RunSolve(solve);
    if (*b) return RunBench(bench);
    if (*c) return RunCrb(crb);
    if (*g) return RunGenerate(gen);
  } catch (const Error& e) {
    return ReportError(e);
  } catch (const std::filesystem::filesystem_error& e) {
    return ReportError(kExitParse, "IoError", e.what());
  } catch (const std::exception& e) {
    return ReportError(kExitNumerical, "InternalError", e.what());
  }
  return 0;
}
