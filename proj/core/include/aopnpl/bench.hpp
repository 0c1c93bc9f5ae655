#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aopnpl/synth.hpp"

namespace aopnpl {

enum class Experiment { kVariance, kBias, kMse, kRuntime };

std::string_view ExperimentName(Experiment e);
Experiment ParseExperiment(std::string_view name);
SizeMode ParseSizeMode(std::string_view name);
std::string_view SizeModeName(SizeMode m);

struct ExperimentConfig {
  Experiment experiment = Experiment::kMse;
  std::vector<int> grid;             // empty: experiment default
  int k_trials = 200;
  std::optional<double> sigma_px;    // empty: experiment default
  std::uint64_t seed = 1;
  SizeMode mode = SizeMode::kBoth;
  bool include_oracle = false;
  bool timing = false;               // report wall time; off keeps output reproducible
  int threads = 0;
  int runtime_repeats = 5;

  std::vector<int> ResolvedGrid() const;
  double ResolvedSigmaPx() const;
  std::vector<Variant> ResolvedVariants() const;
  void Validate() const;
};

struct BenchRow {
  int size_n = 0;
  int size_m = 0;
  double sigma_px = 0.0;
  Variant variant = Variant::kTwoStep;
  TrialMetrics metrics;
  double time_s = 0.0;
};

struct BenchOutput {
  ExperimentConfig config;
  std::vector<BenchRow> rows;
  double runtime_slope = 0.0;  // runtime experiment only
};

BenchOutput RunExperiment(const ExperimentConfig& cfg);

std::string CsvHeader();
std::string CsvRow(const BenchRow& row);
std::string ToCsv(const BenchOutput& out);

}  // namespace aopnpl
