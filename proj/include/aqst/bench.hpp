#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqst/baselines.hpp"
#include "aqst/reconstruct.hpp"

namespace aqst::bench {

enum class Method { algebraic, bm, nuclear };

const char* to_string(Method m);
Method method_from_string(const std::string& name);

struct ExperimentConfig {
  int qubits = 5;
  int rank = 2;
  std::vector<int> d_values{1, 2, 3, 4, 5, 6};
  double snr_db = 30.0;  // +inf: noiseless
  SnrReference snr_reference = SnrReference::aggregate;
  int trials = 20;
  std::vector<Method> methods{Method::algebraic, Method::bm, Method::nuclear};
  std::uint64_t seed = 2025;
  std::string output_path;
  ReconstructionMethod reconstruction = ReconstructionMethod::columnwise;
  BMConfig bm{};            // rank and seed are filled per trial
  NuclearConfig nuclear{};  // seed is filled per trial

  int dim() const { return 1 << qubits; }
};

/// Throws Error(invalid_argument) describing the first violated invariant.
void validate_config(const ExperimentConfig& cfg);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct TrialResult {
  Method method = Method::algebraic;
  int d = 0;
  int trial_index = 0;
  double fidelity = 0.0;
  double trace_distance = 0.0;
  double wall_time_seconds = 0.0;
  std::uint64_t seed_used = 0;
  bool physical = false;  // estimate passed the density-matrix checks
  std::string error;      // non-empty when a stage failed
};

/// Seed of the state shared by every method for (d, trial).
std::uint64_t state_seed(std::uint64_t seed, int d, int trial);
/// Per-trial seed: 64-bit mixing of (seed, method id, d, trial).
std::uint64_t trial_seed(std::uint64_t seed, Method method, int d, int trial);

/// One Ginibre state, one acquisition, one reconstruction. Stage failures
/// are recorded in `error`, never thrown.
TrialResult run_trial(const ExperimentConfig& cfg, Method method, int d, int trial_index);

struct Aggregate {
  Method method = Method::algebraic;
  int d = 0;
  double median_fidelity = 0.0;
  double median_trace_distance = 0.0;
  double median_time = 0.0;
  int failures = 0;
};

struct SweepResult {
  std::vector<TrialResult> trials;  // methods x d_values x trials, in that order
  std::vector<Aggregate> aggregates;
};

/// Median; even counts average the two middle values; NaN for no data.
double median(std::vector<double> values);

std::vector<Aggregate> aggregate(const std::vector<TrialResult>& trials);

/// Runs the Cartesian product with up to `jobs` worker threads. When
/// cfg.output_path is set, writes trials.csv, summary.json and summary.csv
/// there; an unwritable path raises Error(io) before any computation.
SweepResult run_sweep(const ExperimentConfig& cfg, int jobs = 1);

std::string trials_csv(const std::vector<TrialResult>& trials);
std::string summary_csv(const std::vector<Aggregate>& aggregates);
nlohmann::json summary_json(const ExperimentConfig& cfg, const SweepResult& result);

}  // namespace aqst::bench
