#include "aqst/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "aqst/io.hpp"
#include "aqst/rng.hpp"

namespace aqst::bench {

using nlohmann::json;

const char* to_string(Method m) {
  switch (m) {
    case Method::algebraic: return "algebraic";
    case Method::bm: return "bm";
    case Method::nuclear: return "nuclear";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "algebraic") return Method::algebraic;
  if (name == "bm") return Method::bm;
  if (name == "nuclear") return Method::nuclear;
  throw Error(ErrorCode::invalid_argument, "unknown method '" + name + "'");
}

void validate_config(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_argument, "config: " + msg); };
  if (cfg.qubits < 1 || cfg.qubits > 12) fail("qubits must be in [1, 12]");
  const int dim = cfg.dim();
  if (cfg.rank < 1 || cfg.rank >= dim) fail("rank must be in [1, 2^N - 1]");
  if (cfg.trials < 1) fail("trials must be >= 1");
  if (cfg.d_values.empty()) fail("d_values must be non-empty");
  for (int d : cfg.d_values)
    if (d < 1 || d > dim - cfg.rank) fail("every d must be in [1, 2^N - R], got " + std::to_string(d));
  if (cfg.methods.empty()) fail("methods must be non-empty");
  if (std::isnan(cfg.snr_db)) fail("snr_db must not be NaN");
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    cfg.qubits = j.at("qubits").get<int>();
    cfg.rank = j.at("rank").get<int>();
    cfg.d_values = j.at("d_values").get<std::vector<int>>();
    const json& snr = j.at("snr_db");
    if (snr.is_null()) {
      cfg.snr_db = std::numeric_limits<double>::infinity();
    } else if (snr.is_string()) {
      const std::string s = snr.get<std::string>();
      if (s != "inf" && s != "infinity" && s != "none") throw Error(ErrorCode::parse, "snr_db string must be \"inf\"");
      cfg.snr_db = std::numeric_limits<double>::infinity();
    } else {
      cfg.snr_db = snr.get<double>();
    }
    cfg.trials = j.at("trials").get<int>();
    cfg.methods.clear();
    for (const auto& m : j.at("methods")) cfg.methods.push_back(method_from_string(m.get<std::string>()));
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.output_path = j.value("output_path", std::string{});
    const std::string ref = j.value("snr_reference", std::string("aggregate"));
    if (ref == "aggregate") {
      cfg.snr_reference = SnrReference::aggregate;
    } else if (ref == "per_parameter") {
      cfg.snr_reference = SnrReference::per_parameter;
    } else {
      throw Error(ErrorCode::parse, "snr_reference must be \"aggregate\" or \"per_parameter\"");
    }
    const std::string recon = j.value("reconstruction", std::string("columnwise"));
    if (recon == "columnwise") {
      cfg.reconstruction = ReconstructionMethod::columnwise;
    } else if (recon == "eigenvalue") {
      cfg.reconstruction = ReconstructionMethod::eigenvalue;
    } else {
      throw Error(ErrorCode::parse, "reconstruction must be \"columnwise\" or \"eigenvalue\"");
    }
    if (j.contains("bm")) {
      const json& b = j["bm"];
      cfg.bm.max_iter = b.value("max_iter", cfg.bm.max_iter);
      cfg.bm.grad_tol = b.value("grad_tol", cfg.bm.grad_tol);
    }
    if (j.contains("nuclear")) {
      const json& n = j["nuclear"];
      if (n.contains("mu") && !n["mu"].is_null()) cfg.nuclear.mu = n["mu"].get<double>();
      cfg.nuclear.max_iter = n.value("max_iter", cfg.nuclear.max_iter);
      cfg.nuclear.obj_tol = n.value("obj_tol", cfg.nuclear.obj_tol);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("config: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& cfg) {
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  json j = {{"qubits", cfg.qubits},
            {"rank", cfg.rank},
            {"d_values", cfg.d_values},
            {"trials", cfg.trials},
            {"methods", methods},
            {"seed", cfg.seed},
            {"output_path", cfg.output_path},
            {"reconstruction", to_string(cfg.reconstruction)},
            {"snr_reference", cfg.snr_reference == SnrReference::aggregate ? "aggregate" : "per_parameter"},
            {"bm", {{"max_iter", cfg.bm.max_iter}, {"grad_tol", cfg.bm.grad_tol}}},
            {"nuclear", {{"max_iter", cfg.nuclear.max_iter}, {"obj_tol", cfg.nuclear.obj_tol}}}};
  if (std::isinf(cfg.snr_db)) {
    j["snr_db"] = "inf";
  } else {
    j["snr_db"] = cfg.snr_db;
  }
  if (cfg.nuclear.mu) j["nuclear"]["mu"] = *cfg.nuclear.mu;
  return j;
}

std::uint64_t state_seed(std::uint64_t seed, int d, int trial) {
  return combine_seed(combine_seed(combine_seed(seed, 0x57A7E), static_cast<std::uint64_t>(d)),
                      static_cast<std::uint64_t>(trial));
}

std::uint64_t trial_seed(std::uint64_t seed, Method method, int d, int trial) {
  const auto id = static_cast<std::uint64_t>(method) + 1;
  return combine_seed(combine_seed(combine_seed(seed, id), static_cast<std::uint64_t>(d)),
                      static_cast<std::uint64_t>(trial));
}

TrialResult run_trial(const ExperimentConfig& cfg, Method method, int d, int trial_index) {
  TrialResult out;
  out.method = method;
  out.d = d;
  out.trial_index = trial_index;
  out.seed_used = trial_seed(cfg.seed, method, d, trial_index);
  out.fidelity = std::numeric_limits<double>::quiet_NaN();
  out.trace_distance = std::numeric_limits<double>::quiet_NaN();
  out.wall_time_seconds = std::numeric_limits<double>::quiet_NaN();
  try {
    const int dim = cfg.dim();
    const DensityMatrix rho = ginibre_random_state(dim, cfg.rank, state_seed(cfg.seed, d, trial_index));
    const SelectionPattern pattern = overlapping_block_pattern(dim, cfg.rank, d);
    const NoiseSpec noise = std::isfinite(cfg.snr_db)
                                ? NoiseSpec::gaussian(cfg.snr_db, combine_seed(out.seed_used, 1), cfg.snr_reference)
                                : NoiseSpec::noiseless();
    using clock = std::chrono::steady_clock;
    std::optional<ReconstructionResult> result;
    clock::time_point start;
    if (method == Method::algebraic) {
      const auto subs = sample_submatrices(rho, pattern, noise);
      AlgebraicOptions opts;
      opts.method = cfg.reconstruction;
      start = clock::now();
      result.emplace(algebraic_qst(subs, cfg.rank, opts));
    } else {
      const auto budget = static_cast<int>(matched_budget(dim, pattern));
      const auto observables = random_pauli_set(cfg.qubits, budget, combine_seed(out.seed_used, 2));
      const MeasurementRecord record = pauli_expectations(rho, observables, noise);
      if (method == Method::bm) {
        BMConfig bm = cfg.bm;
        bm.rank = cfg.rank;
        bm.seed = combine_seed(out.seed_used, 3);
        start = clock::now();
        result.emplace(bm_qst(record, bm));
      } else {
        NuclearConfig nc = cfg.nuclear;
        nc.seed = combine_seed(out.seed_used, 4);
        start = clock::now();
        result.emplace(nuclear_qst(record, nc));
      }
    }
    out.wall_time_seconds = std::chrono::duration<double>(clock::now() - start).count();
    out.fidelity = fidelity(rho, result->rho_hat);
    out.trace_distance = trace_distance(rho, result->rho_hat);
    out.physical = physicality(result->rho_hat.matrix()).ok();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<Aggregate> aggregate(const std::vector<TrialResult>& trials) {
  std::map<std::pair<int, int>, std::vector<const TrialResult*>> groups;
  std::vector<std::pair<int, int>> order;
  for (const TrialResult& t : trials) {
    const auto key = std::make_pair(static_cast<int>(t.method), t.d);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&t);
  }
  std::vector<Aggregate> out;
  for (const auto& key : order) {
    const auto& rows = groups[key];
    std::vector<double> fid, td, time;
    Aggregate a;
    a.method = static_cast<Method>(key.first);
    a.d = key.second;
    for (const TrialResult* t : rows) {
      if (!t->error.empty()) {
        ++a.failures;
        continue;
      }
      fid.push_back(t->fidelity);
      td.push_back(t->trace_distance);
      time.push_back(t->wall_time_seconds);
    }
    a.median_fidelity = median(fid);
    a.median_trace_distance = median(td);
    a.median_time = median(time);
    out.push_back(a);
  }
  return out;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string trials_csv(const std::vector<TrialResult>& trials) {
  std::ostringstream out;
  out << "method,d,trial,fidelity,trace_distance,wall_time_s,seed\n";
  for (const TrialResult& t : trials) {
    out << to_string(t.method) << ',' << t.d << ',' << t.trial_index << ',' << fmt_double(t.fidelity) << ','
        << fmt_double(t.trace_distance) << ',' << fmt_double(t.wall_time_seconds) << ',' << t.seed_used << '\n';
  }
  return out.str();
}

std::string summary_csv(const std::vector<Aggregate>& aggregates) {
  std::ostringstream out;
  out << "method,d,median_fidelity,median_trace_distance,median_time\n";
  for (const Aggregate& a : aggregates) {
    out << to_string(a.method) << ',' << a.d << ',' << fmt_double(a.median_fidelity) << ','
        << fmt_double(a.median_trace_distance) << ',' << fmt_double(a.median_time) << '\n';
  }
  return out.str();
}

json summary_json(const ExperimentConfig& cfg, const SweepResult& result) {
  json rows = json::array();
  for (const Aggregate& a : result.aggregates) {
    rows.push_back({{"method", to_string(a.method)},
                    {"d", a.d},
                    {"median_fidelity", a.median_fidelity},
                    {"median_trace_distance", a.median_trace_distance},
                    {"median_time_s", a.median_time},
                    {"failures", a.failures}});
  }
  json errors = json::array();
  for (const TrialResult& t : result.trials)
    if (!t.error.empty())
      errors.push_back({{"method", to_string(t.method)}, {"d", t.d}, {"trial", t.trial_index}, {"error", t.error}});
  return {{"config", config_to_json(cfg)},
          {"metadata",
           {{"algebraic_reconstruction", to_string(cfg.reconstruction)},
            {"states_shared_across_methods", true},
            {"timing_scope", "reconstruction only"},
            {"snr_reference", cfg.snr_reference == SnrReference::aggregate
                                  ? "rms of all independent real measurement parameters"
                                  : "magnitude of each real measurement parameter"}}},
          {"aggregates", rows},
          {"errors", errors}};
}

SweepResult run_sweep(const ExperimentConfig& cfg, int jobs) {
  validate_config(cfg);
  std::filesystem::path out_dir;
  if (!cfg.output_path.empty()) {
    out_dir = cfg.output_path;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream probe(out_dir / "trials.csv");
    if (ec || !probe) throw Error(ErrorCode::io, "output path not writable: " + out_dir.string());
  }

  struct Task {
    Method method;
    int d;
    int trial;
  };
  std::vector<Task> tasks;
  for (Method m : cfg.methods)
    for (int d : cfg.d_values)
      for (int t = 0; t < cfg.trials; ++t) tasks.push_back({m, d, t});

  SweepResult result;
  result.trials.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++)
      result.trials[k] = run_trial(cfg, tasks[k].method, tasks[k].d, tasks[k].trial);
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  result.aggregates = aggregate(result.trials);

  if (!out_dir.empty()) {
    io::write_text_file(out_dir / "trials.csv", trials_csv(result.trials));
    io::write_text_file(out_dir / "summary.csv", summary_csv(result.aggregates));
    io::write_text_file(out_dir / "summary.json", summary_json(cfg, result).dump(2) + "\n");
  }
  return result;
}

}  // namespace aqst::bench
