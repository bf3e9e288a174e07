// qanneal: experiment runner for the post-selected quantum annealing circuit.
//
//   qanneal generate graph --v 8 --p 0.5 --lambda 1.0 --seed 7 --out g.json
//   qanneal generate cost  --n 6 --m 2 --seed 3 --out c.json
//   qanneal verify  --instance g.json --b 2
//   qanneal sample  --instance g.json --b 4 --trials 100000 --mode closed --seed 1
//   qanneal sweep   --instance g.json --b-list 1,2,4,8,16,32 --out sweep.csv
//   qanneal compare --instance g.json --b 2 --seed 1

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qanneal/qanneal.hpp"

namespace {

using qanneal::Json;

struct CommonOptions {
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 1;
  bool no_timestamp = false;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--seed", common.seed, "Master seed")->capture_default_str();
  cmd->add_option("--out", common.out, "Output path (stdout when omitted)");
  cmd->add_option("--threads", common.threads, "Worker threads")
      ->check(CLI::Range(1U, 1024U))
      ->capture_default_str();
  cmd->add_flag("--no-timestamp", common.no_timestamp, "Omit the timestamp for byte-exact reruns");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// --threads is deliberately not recorded: it never changes a result, and leaving it
// out keeps outputs byte-identical across thread counts.
Json envelope(const std::string& command, Json config, const CommonOptions& common) {
  Json j;
  j["tool"] = "qanneal";
  j["version"] = qanneal::kVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  if (!common.no_timestamp) j["timestamp"] = utc_timestamp();
  return j;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw qanneal::InputError("cannot open output file '" + path + "'");
  f << text;
}

void emit_json(const std::string& path, const Json& j) { emit(path, j.dump(2) + "\n"); }

qanneal::CostFunction load_instance(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw qanneal::InputError("cannot open instance file '" + path + "'");
  Json j;
  try {
    j = Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw qanneal::InputError("instance file '" + path + "' is not valid JSON: " + e.what());
  }
  return qanneal::instance_from_json(j);
}

// --- generate ---------------------------------------------------------------

struct GraphSpec {
  unsigned v = 8;
  double p = 0.5;
  double lambda = 0.0;
  double j = 1.0;
};

struct CostSpec {
  unsigned n = 6;
  unsigned m = 2;
  double density = 0.5;
};

int run_generate_graph(const GraphSpec& spec, const CommonOptions& common) {
  const auto g = qanneal::random_graph(spec.v, spec.p, common.seed, spec.j, spec.lambda);
  Json out = qanneal::to_json(g);
  Json gen;
  gen["kind"] = "graph";
  gen["version"] = qanneal::kGeneratorVersion;
  gen["tool_version"] = qanneal::kVersion;
  gen["seed"] = common.seed;
  out["generator"] = std::move(gen);
  emit_json(common.out, out);
  return 0;
}

int run_generate_cost(const CostSpec& spec, const CommonOptions& common) {
  const auto c = qanneal::random_local_cost(spec.n, spec.m, spec.density, common.seed);
  Json out = qanneal::to_json(c);
  Json gen;
  gen["kind"] = "cost";
  gen["version"] = qanneal::kGeneratorVersion;
  gen["tool_version"] = qanneal::kVersion;
  gen["seed"] = common.seed;
  gen["m"] = spec.m;
  gen["density"] = spec.density;
  out["generator"] = std::move(gen);
  emit_json(common.out, out);
  return 0;
}

// --- verify -----------------------------------------------------------------

struct VerifyOptions {
  std::string instance;
  unsigned b = 1;
  double tolerance = 1e-10;
  bool corrupt_phase = false;
  std::string dump;
};

int run_verify(const VerifyOptions& opt, const CommonOptions& common) {
  const auto cost = load_instance(opt.instance);
  auto program = qanneal::build_phase_tables(cost, +1);
  if (opt.corrupt_phase) {
    // Negative control: perturb one entry of the last gate.
    program.back().table.phases.back() *= std::polar(1.0, 0.1);
  }
  const std::size_t n_states = cost.state_count();

  double product_residual = 0.0;
  for (qanneal::Bits x = 0; x < n_states; ++x) {
    const auto direct = std::polar(1.0, std::numbers::pi / 2.0 * cost.normalize(x));
    product_residual = std::max(product_residual, std::abs(qanneal::composed_phase(program, x) - direct));
  }

  const auto gate = qanneal::run_circuit(program, cost.n(), opt.b);
  const auto closed = qanneal::closed_form_final_state(cost, opt.b);
  const double state_residual = qanneal::max_deviation(gate, closed);
  const double norm_residual = std::abs(gate.norm_squared() - 1.0);

  const qanneal::Ensemble ens(cost);
  const auto post = qanneal::postselect_zero(gate);
  const double p0_residual = std::abs(post.probability - ens.partition_function(opt.b).p0b);
  const auto exact = ens.distribution(opt.b);
  double dist_residual = 0.0;
  for (std::size_t x = 0; x < n_states; ++x) {
    dist_residual = std::max(dist_residual, std::abs(std::norm(post.search[x]) - exact[x]));
  }

  if (!opt.dump.empty()) {
    std::ofstream f(opt.dump, std::ios::binary);
    if (!f) throw qanneal::InputError("cannot open dump file '" + opt.dump + "'");
    qanneal::write_amplitudes(f, gate);
  }

  Json config;
  config["instance"] = opt.instance;
  config["b"] = opt.b;
  config["tolerance"] = opt.tolerance;
  config["corrupt_phase"] = opt.corrupt_phase;
  config["seed"] = common.seed;
  Json report = envelope("verify", std::move(config), common);
  report["n"] = cost.n();
  Json checks;
  checks["product_decomposition"] = product_residual;
  checks["gate_vs_closed_form"] = state_residual;
  checks["norm"] = norm_residual;
  checks["postselection_probability"] = p0_residual;
  checks["postselected_distribution"] = dist_residual;
  bool passed = true;
  for (const auto& [name, value] : checks.items()) {
    passed = passed && value.get<double>() < opt.tolerance;
  }
  report["p0b"] = post.probability;
  report["checks"] = std::move(checks);
  report["passed"] = passed;
  emit_json(common.out, report);
  return passed ? 0 : 1;
}

// --- sample -----------------------------------------------------------------

struct SampleOptions {
  std::string instance;
  unsigned b = 1;
  std::uint64_t trials = 1000;
  std::string mode = "closed";
  std::uint64_t max_repetitions = qanneal::kDefaultMaxRepetitions;
  bool summary_only = false;
};

int run_sample(const SampleOptions& opt, const CommonOptions& common) {
  const auto cost = load_instance(opt.instance);
  const auto mode = qanneal::parse_sampling_mode(opt.mode);
  const qanneal::Sampler sampler(cost, opt.b, mode, opt.max_repetitions);

  struct Trial {
    std::optional<qanneal::RunOutcome> outcome;
    std::uint64_t seed = 0;
  };
  std::vector<Trial> trials(opt.trials);
  qanneal::parallel_for(opt.trials, [&](std::size_t i) {
    trials[i].seed = qanneal::derive_seed(common.seed, i);
    qanneal::Rng rng(trials[i].seed);
    try {
      trials[i].outcome = sampler(rng);
    } catch (const qanneal::RepetitionLimitError&) {
      trials[i].outcome.reset();
    }
  });

  const qanneal::Ensemble ens(cost);
  const auto exact = ens.distribution(opt.b);
  const double p0 = ens.partition_function(opt.b).p0b;
  std::vector<std::uint64_t> counts(cost.state_count(), 0);
  std::uint64_t completed = 0;
  double rep_sum = 0.0;
  Json samples = Json::array();
  for (const auto& t : trials) {
    if (t.outcome) {
      ++completed;
      ++counts[t.outcome->result];
      rep_sum += static_cast<double>(t.outcome->repetitions);
      if (!opt.summary_only) {
        samples.push_back(qanneal::run_report(*t.outcome, cost.n(), opt.b, mode, t.seed));
      }
    } else if (!opt.summary_only) {
      Json aborted;
      aborted["b"] = opt.b;
      aborted["mode"] = std::string(qanneal::to_string(mode));
      aborted["aborted"] = true;
      aborted["seed"] = t.seed;
      samples.push_back(std::move(aborted));
    }
  }

  Json summary;
  summary["trials"] = opt.trials;
  summary["completed"] = completed;
  summary["aborted"] = opt.trials - completed;
  summary["p0b"] = p0;
  summary["expected_repetitions"] = 1.0 / p0;
  if (completed > 0) {
    const double mean = rep_sum / static_cast<double>(completed);
    // Geometric law: sd = sqrt(1 - p) / p.
    const double stderr_mean = std::sqrt(1.0 - p0) / p0 / std::sqrt(static_cast<double>(completed));
    double tv = 0.0;
    Json empirical;
    for (std::size_t x = 0; x < counts.size(); ++x) {
      const double freq = static_cast<double>(counts[x]) / static_cast<double>(completed);
      tv += std::abs(freq - exact[x]);
      if (counts[x] > 0) empirical[qanneal::to_bitstring(x, cost.n())] = freq;
    }
    summary["mean_repetitions"] = mean;
    summary["repetitions_standard_error"] = stderr_mean;
    summary["repetitions_z_score"] = stderr_mean > 0 ? (mean - 1.0 / p0) / stderr_mean : 0.0;
    summary["tv_distance"] = 0.5 * tv;
    summary["empirical"] = std::move(empirical);
  }

  Json config;
  config["instance"] = opt.instance;
  config["b"] = opt.b;
  config["trials"] = opt.trials;
  config["mode"] = std::string(qanneal::to_string(mode));
  config["seed"] = common.seed;
  config["max_repetitions"] = opt.max_repetitions;
  config["summary_only"] = opt.summary_only;
  Json report = envelope("sample", std::move(config), common);
  report["summary"] = summary;
  if (!opt.summary_only) report["samples"] = std::move(samples);
  emit_json(common.out, report);
  if (!common.out.empty()) std::cout << summary.dump(2) << "\n";
  return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepOptions {
  std::string instance;
  std::vector<double> b_list{1, 2, 4, 8, 16, 32};
};

int run_sweep(const SweepOptions& opt, const CommonOptions& common) {
  const auto cost = load_instance(opt.instance);
  const qanneal::Ensemble ens(cost);
  const auto points = ens.sweep(opt.b_list);

  Json config;
  config["instance"] = opt.instance;
  config["b_list"] = opt.b_list;
  config["seed"] = common.seed;
  const Json head = envelope("sweep", std::move(config), common);
  std::ostringstream out;
  out << "# tool=qanneal version=" << qanneal::kVersion << "\n";
  out << "# config=" << head["config"].dump() << "\n";
  if (head.contains("timestamp")) out << "# timestamp=" << head["timestamp"].get<std::string>() << "\n";
  out << "# C_inf=" << qanneal::format_number(ens.c_inf())
      << " C_opt=" << qanneal::format_number(ens.min_cost())
      << " degenerate=" << (ens.degenerate() ? 1 : 0) << "\n";
  qanneal::write_sweep_csv(out, points, ens.degenerate());
  emit(common.out, out.str());
  return 0;
}

// --- compare ----------------------------------------------------------------

struct CompareOptions {
  std::string instance;
  double b = 2;
  std::uint64_t trials = 50;
  std::uint64_t sa_min_steps = 1;
  std::uint64_t sa_max_steps = std::uint64_t{1} << 20;
  std::optional<double> t_start;
  std::optional<double> t_end;
  std::string mode = "closed";
};

int run_compare(const CompareOptions& opt, const CommonOptions& common) {
  const auto cost = load_instance(opt.instance);
  const auto mode = qanneal::parse_sampling_mode(opt.mode);
  auto schedule = qanneal::AnnealingSchedule::default_for(cost);
  if (opt.t_start) schedule.t_start = *opt.t_start;
  if (opt.t_end) schedule.t_end = *opt.t_end;
  schedule.validate();

  qanneal::AnnealingParams params{schedule, opt.sa_min_steps, opt.sa_max_steps};
  const auto rec = qanneal::compare_loads(cost, opt.b, params, opt.trials, common.seed);
  const auto truth = qanneal::brute_force_min(cost);

  // Quantum runs through the sampler, and SA at its default step budget.
  const double b_int = std::round(opt.b);
  Json quantum_runs;
  if (b_int == opt.b && b_int >= 1) {
    const qanneal::Sampler sampler(cost, static_cast<unsigned>(b_int), mode);
    std::vector<qanneal::RunOutcome> outs(opt.trials);
    qanneal::parallel_for(opt.trials, [&](std::size_t i) {
      qanneal::Rng rng(qanneal::derive_seed(common.seed ^ 0x51ULL, i));
      outs[i] = sampler(rng);
    });
    std::uint64_t hits = 0;
    double reps = 0;
    for (const auto& o : outs) {
      hits += o.cost_value == truth.min_value;
      reps += static_cast<double>(o.repetitions);
    }
    quantum_runs["mode"] = std::string(qanneal::to_string(mode));
    quantum_runs["trials"] = opt.trials;
    quantum_runs["optimum_hits"] = hits;
    quantum_runs["mean_repetitions"] = opt.trials ? reps / static_cast<double>(opt.trials) : 0.0;
  }
  const auto default_steps = qanneal::default_annealing_steps(cost.n());
  std::vector<qanneal::BaselineReport> sa_runs(opt.trials);
  qanneal::parallel_for(opt.trials, [&](std::size_t i) {
    sa_runs[i] = qanneal::simulated_annealing(cost, schedule, default_steps,
                                              qanneal::derive_seed(common.seed ^ 0x5aULL, i));
  });
  std::uint64_t sa_hits = 0;
  for (const auto& r : sa_runs) sa_hits += r.best_cost == truth.min_value;
  Json sa_default;
  sa_default["steps"] = default_steps;
  sa_default["evaluations_per_run"] = default_steps + 1;
  sa_default["trials"] = opt.trials;
  sa_default["optimum_hits"] = sa_hits;

  Json config;
  config["instance"] = opt.instance;
  config["b"] = opt.b;
  config["trials"] = opt.trials;
  config["seed"] = common.seed;
  config["mode"] = std::string(qanneal::to_string(mode));
  config["sa_min_steps"] = opt.sa_min_steps;
  config["sa_max_steps"] = opt.sa_max_steps;
  config["t_start"] = schedule.t_start;
  config["t_end"] = schedule.t_end;
  Json report = envelope("compare", std::move(config), common);
  Json ground;
  ground["min_cost"] = truth.min_value;
  Json argmin = Json::array();
  for (auto x : truth.argmin) argmin.push_back(qanneal::to_bitstring(x, cost.n()));
  ground["argmin"] = std::move(argmin);
  report["ground_truth"] = std::move(ground);
  report["comparison"] = qanneal::to_json(rec);
  report["quantum_runs"] = std::move(quantum_runs);
  report["sa_default_runs"] = std::move(sa_default);
  emit_json(common.out, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-selected quantum annealing simulator and experiment runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qanneal::kVersion);
  CommonOptions common;

  auto* generate = app.add_subcommand("generate", "Write a random instance file");
  generate->require_subcommand(1);
  GraphSpec graph_spec;
  auto* gen_graph = generate->add_subcommand("graph", "Random graph-partitioning instance");
  gen_graph->add_option("--v", graph_spec.v, "Even vertex count")->required();
  gen_graph->add_option("--p", graph_spec.p, "Edge probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gen_graph->add_option("--lambda", graph_spec.lambda, "Balance penalty")->capture_default_str();
  gen_graph->add_option("--j", graph_spec.j, "Coupling J")->capture_default_str();
  add_common(gen_graph, common);
  CostSpec cost_spec;
  auto* gen_cost = generate->add_subcommand("cost", "Random k-local cost instance");
  gen_cost->add_option("--n", cost_spec.n, "Bit count")->required();
  gen_cost->add_option("--m", cost_spec.m, "Maximum term arity")->capture_default_str();
  gen_cost->add_option("--density", cost_spec.density, "Term inclusion probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_common(gen_cost, common);

  VerifyOptions verify_opt;
  auto* verify = app.add_subcommand("verify", "Gate-level circuit against the closed forms");
  verify->add_option("--instance", verify_opt.instance, "Instance JSON")->required();
  verify->add_option("--b", verify_opt.b, "Control qubits")->required()->check(CLI::Range(1U, 62U));
  verify->add_option("--tolerance", verify_opt.tolerance, "Residual threshold")->capture_default_str();
  verify->add_option("--dump", verify_opt.dump, "Write the final amplitudes (raw little-endian float64)");
  verify->add_flag("--corrupt-phase", verify_opt.corrupt_phase)->group("");
  add_common(verify, common);

  SampleOptions sample_opt;
  auto* sample = app.add_subcommand("sample", "Repeat-until-success runs");
  sample->add_option("--instance", sample_opt.instance, "Instance JSON")->required();
  sample->add_option("--b", sample_opt.b, "Control qubits")->required()->check(CLI::Range(1U, 100000U));
  sample->add_option("--trials", sample_opt.trials, "Number of runs")->capture_default_str();
  sample->add_option("--mode", sample_opt.mode, "gate or closed")
      ->check(CLI::IsMember({"gate", "closed"}))
      ->capture_default_str();
  sample->add_option("--max-repetitions", sample_opt.max_repetitions, "Per-run repetition cutoff")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sample->add_flag("--summary-only", sample_opt.summary_only, "Omit per-run records");
  add_common(sample, common);

  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Effective thermodynamics over a list of b");
  sweep->add_option("--instance", sweep_opt.instance, "Instance JSON")->required();
  sweep->add_option("--b-list", sweep_opt.b_list, "Comma-separated b values")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(sweep, common);

  CompareOptions cmp_opt;
  auto* compare = app.add_subcommand("compare", "Quantum load against simulated annealing");
  compare->add_option("--instance", cmp_opt.instance, "Instance JSON")->required();
  compare->add_option("--b", cmp_opt.b, "Control qubits")->check(CLI::PositiveNumber)->capture_default_str();
  compare->add_option("--trials", cmp_opt.trials, "SA runs per step budget")->capture_default_str();
  compare->add_option("--sa-min-steps", cmp_opt.sa_min_steps, "First SA step budget")->capture_default_str();
  compare->add_option("--sa-max-steps", cmp_opt.sa_max_steps, "Largest SA step budget")->capture_default_str();
  compare->add_option("--t-start", cmp_opt.t_start, "SA start temperature (default: mean flip span)");
  compare->add_option("--t-end", cmp_opt.t_end, "SA end temperature (default: 1e-3 t_start)");
  compare->add_option("--mode", cmp_opt.mode, "Quantum sampling mode, gate or closed")
      ->check(CLI::IsMember({"gate", "closed"}))
      ->capture_default_str();
  add_common(compare, common);

  CLI11_PARSE(app, argc, argv);
  qanneal::set_thread_count(common.threads);

  try {
    if (gen_graph->parsed()) return run_generate_graph(graph_spec, common);
    if (gen_cost->parsed()) return run_generate_cost(cost_spec, common);
    if (verify->parsed()) return run_verify(verify_opt, common);
    if (sample->parsed()) return run_sample(sample_opt, common);
    if (sweep->parsed()) return run_sweep(sweep_opt, common);
    if (compare->parsed()) return run_compare(cmp_opt, common);
  } catch (const qanneal::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qanneal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
