// Command-line front end: state generation, pattern validation and the
// benchmark runs.

#include <cmath>
#include <iostream>

#include <CLI11.hpp>

#include "aqst/bench.hpp"
#include "aqst/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kRuntime = 3;

int classify(const aqst::Error& e) {
  switch (e.code()) {
    case aqst::ErrorCode::invalid_argument:
    case aqst::ErrorCode::invalid_rank:
    case aqst::ErrorCode::invalid_pattern_parameters:
    case aqst::ErrorCode::parse:
      return kValidation;
    default:
      return kRuntime;
  }
}

void print_aggregates(const aqst::bench::SweepResult& r) {
  for (const auto& a : r.aggregates) {
    std::cout << aqst::bench::to_string(a.method) << " d=" << a.d << "  fidelity=" << a.median_fidelity
              << "  trace_distance=" << a.median_trace_distance << "  time_s=" << a.median_time;
    if (a.failures > 0) std::cout << "  failures=" << a.failures;
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algebraic low-rank quantum state tomography"};
  app.require_subcommand(1);

  int qubits = 0;
  int rank = 0;
  std::uint64_t seed = 0;
  std::string out_file;
  auto* gen = app.add_subcommand("gen", "Write a random Ginibre state as JSON");
  gen->add_option("--qubits", qubits, "Number of qubits N (D = 2^N)")->required()->check(CLI::Range(1, 12));
  gen->add_option("--rank", rank, "Rank R")->required();
  gen->add_option("--seed", seed, "Generator seed")->required();
  gen->add_option("--out", out_file, "Output file")->required();

  std::string pattern_file;
  int validate_rank = 0;
  auto* validate = app.add_subcommand("validate", "Check a selection pattern; exit 0 iff all checks pass");
  validate->add_option("--pattern", pattern_file, "Pattern JSON file")->required();
  validate->add_option("--rank", validate_rank, "Rank R")->required();

  std::string config_file;
  auto* run = app.add_subcommand("run", "Single method, single d run");
  run->add_option("--config", config_file, "Experiment config JSON")->required();

  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Full benchmark sweep");
  sweep->add_option("--config", config_file, "Experiment config JSON")->required();
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      const aqst::DensityMatrix rho = aqst::ginibre_random_state(1 << qubits, rank, seed);
      aqst::io::write_text_file(out_file, aqst::io::density_to_json(rho).dump() + "\n");
      return kOk;
    }
    if (*validate) {
      const aqst::SelectionPattern p = aqst::io::pattern_from_json(aqst::io::read_json_file(pattern_file));
      const aqst::PatternReport report = aqst::validate_pattern(p, validate_rank);
      std::cout << aqst::io::report_to_json(report).dump(2) << '\n';
      return report.all_ok() ? kOk : kValidation;
    }
    aqst::bench::ExperimentConfig cfg = aqst::bench::config_from_json(aqst::io::read_json_file(config_file));
    if (*run) {
      if (cfg.methods.size() != 1 || cfg.d_values.size() != 1) {
        std::cerr << "run: config must name exactly one method and one d value (use sweep otherwise)\n";
        return kValidation;
      }
      const aqst::bench::SweepResult r = aqst::bench::run_sweep(cfg, 1);
      std::cout << aqst::bench::summary_json(cfg, r).dump(2) << '\n';
      return kOk;
    }
    const aqst::bench::SweepResult r = aqst::bench::run_sweep(cfg, jobs);
    print_aggregates(r);
    return kOk;
  } catch (const aqst::Error& e) {
    std::cerr << "error (" << aqst::to_string(e.code()) << "): " << e.what() << '\n';
    return classify(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
