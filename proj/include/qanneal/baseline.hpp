#pragma once

// Classical reference points: exhaustive minimization and single-flip Metropolis
// simulated annealing, both counting cost-function evaluations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qanneal/bits.hpp"
#include "qanneal/cost.hpp"
#include "qanneal/ensemble.hpp"
#include "qanneal/errors.hpp"
#include "qanneal/parallel.hpp"
#include "qanneal/rng.hpp"

namespace qanneal {

struct MinimumResult {
  std::vector<Bits> argmin;  // ascending
  double min_value = 0;
};

inline MinimumResult brute_force_min(const CostFunction& cost,
                                     unsigned cap = kDefaultEnumerationCap) {
  if (cost.n() > cap) {
    throw CapacityError("brute-force minimization of " + std::to_string(cost.n()) +
                        " bits exceeds the cap of " + std::to_string(cap));
  }
  MinimumResult out;
  out.min_value = INFINITY;
  for (Bits x = 0; x < cost.state_count(); ++x) {
    const double c = cost.evaluate(x);
    if (c < out.min_value) {
      out.min_value = c;
      out.argmin.clear();
    }
    if (c == out.min_value) out.argmin.push_back(x);
  }
  return out;
}

/// Wraps a cost and counts every evaluation.
class CountingCost {
 public:
  explicit CountingCost(const CostFunction& cost) : cost_(cost) {}

  double operator()(Bits x) {
    ++count_;
    return cost_.evaluate(x);
  }

  std::uint64_t count() const { return count_; }
  const CostFunction& cost() const { return cost_; }

 private:
  const CostFunction& cost_;
  std::uint64_t count_ = 0;
};

/// Geometric cooling from t_start to t_end over the run's steps. Both zero means a
/// zero-temperature (pure descent) run.
struct AnnealingSchedule {
  double t_start = 1.0;
  double t_end = 1e-3;

  void validate() const {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_start < 0.0 || t_end < 0.0) {
      throw InputError("annealing temperatures must be finite and non-negative");
    }
    if (t_end > t_start) throw InputError("annealing schedule must cool (t_end <= t_start)");
    if (t_end == 0.0 && t_start != 0.0) {
      throw InputError("geometric schedule cannot reach zero; use t_start = t_end = 0 for descent");
    }
  }

  /// Per-step cooling factor for a run of n_steps moves.
  double ratio(std::uint64_t n_steps) const {
    if (t_start == 0.0 || n_steps <= 1) return 1.0;
    return std::pow(t_end / t_start, 1.0 / static_cast<double>(n_steps - 1));
  }

  double temperature(std::uint64_t step, std::uint64_t n_steps) const {
    if (t_start == 0.0 || n_steps <= 1) return t_start;
    const double frac = static_cast<double>(step) / static_cast<double>(n_steps - 1);
    return t_start * std::pow(t_end / t_start, frac);
  }

  /// Starts at the mean single-flip cost span and cools by three decades.
  static AnnealingSchedule default_for(const CostFunction& cost) {
    std::vector<double> span(cost.n(), 0.0);
    for (const auto& term : cost.terms()) {
      const double w = term.max_value() - term.min_value();
      for (unsigned q : term.qubits) span[q] += w;
    }
    double mean = 0.0;
    for (double s : span) mean += s;
    mean /= cost.n();
    if (!(mean > 0.0)) return {0.0, 0.0};
    return {mean, mean * 1e-3};
  }
};

inline std::uint64_t default_annealing_steps(unsigned n) { return 200ULL * n; }

struct BaselineReport {
  Bits best = 0;
  double best_cost = 0;
  std::uint64_t evaluations = 0;
  std::string method = "simulated_annealing";
  std::uint64_t seed = 0;
};

/// One Metropolis decision, as seen by an optional observer.
struct AnnealStep {
  std::uint64_t step = 0;
  double temperature = 0;
  double current_cost = 0;   // before the move
  double proposal_cost = 0;
  bool accepted = false;
};

using AnnealObserver = std::function<void(const AnnealStep&)>;

/// Single-bit-flip Metropolis chain from a uniform random start; returns the best
/// state seen. Evaluations are n_steps + 1 (the start plus one per proposal).
inline BaselineReport simulated_annealing(const CostFunction& cost,
                                          const AnnealingSchedule& schedule,
                                          std::uint64_t n_steps, std::uint64_t seed,
                                          const AnnealObserver& observer = {}) {
  schedule.validate();
  Rng rng(seed);
  CountingCost counted(cost);
  Bits current = rng.next() & low_mask(cost.n());
  double current_cost = counted(current);
  BaselineReport report;
  report.best = current;
  report.best_cost = current_cost;
  report.seed = seed;
  for (std::uint64_t step = 0; step < n_steps; ++step) {
    const double temp = schedule.temperature(step, n_steps);
    const Bits proposal = current ^ (Bits{1} << rng.below(cost.n()));
    const double proposal_cost = counted(proposal);
    const double delta = proposal_cost - current_cost;
    // Draw unconditionally so the stream does not depend on the acceptance path.
    const double u = rng.uniform();
    const bool accept = delta <= 0.0 || (temp > 0.0 && u < std::exp(-delta / temp));
    if (observer) observer(AnnealStep{step, temp, current_cost, proposal_cost, accept});
    if (accept) {
      current = proposal;
      current_cost = proposal_cost;
      if (current_cost < report.best_cost) {
        report.best = current;
        report.best_cost = current_cost;
      }
    }
  }
  report.evaluations = counted.count();
  return report;
}

struct AnnealingParams {
  std::optional<AnnealingSchedule> schedule;  // default_for(cost) when empty
  std::uint64_t min_steps = 1;
  std::uint64_t max_steps = std::uint64_t{1} << 20;
};

/// SA runs at one step budget.
struct LadderRung {
  std::uint64_t steps = 0;
  std::uint64_t evaluations_per_run = 0;
  double mean_best_cost = 0;
  std::optional<double> accuracy;
  std::uint64_t optimum_hits = 0;
};

inline constexpr const char* kLoadAccountingNote =
    "quantum load counts one unit per execution of the deterministic part (all 2^n "
    "states are evaluated in parallel), so its expected load is 1/P0_b; classical "
    "load counts every cost-function evaluation of a simulated-annealing run";

/// Quantum expected repetitions against the SA evaluations needed to reach the
/// same accuracy.
struct LoadComparison {
  double b = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double optimum_cost = 0;
  std::size_t optimum_count = 0;
  // quantum side
  double p0b = 0;
  double expected_repetitions = 0;
  double effective_cost = 0;
  double c_inf = 0;
  std::optional<double> accuracy;
  double optimum_probability = 0;  // post-selected mass on the argmin set
  bool mode_is_optimum = false;    // most probable outcome is a minimizer
  // classical side
  AnnealingSchedule schedule;
  std::vector<LadderRung> ladder;
  std::optional<std::uint64_t> evaluations_to_match;
  std::string note = kLoadAccountingNote;
};

/// SA quality is matched through the accuracy measure: a rung matches when its
/// mean best cost is at or below the quantum effective cost at b, which is the same
/// as SA accuracy >= quantum accuracy. Step budgets double from min_steps until a
/// rung matches or max_steps is passed. trials = 0 returns the quantum side only.
inline LoadComparison compare_loads(const CostFunction& cost, double b, const AnnealingParams& params,
                                    std::uint64_t trials, std::uint64_t seed) {
  if (!(b > 0.0)) throw InputError("b must be positive");
  if (params.min_steps == 0 || params.max_steps < params.min_steps) {
    throw InputError("invalid SA step range");
  }
  const Ensemble ens(cost);
  const auto truth = brute_force_min(cost);
  const auto point = ens.thermo_point(1.0 / b);
  const auto dist = ens.distribution(b);

  LoadComparison rec;
  rec.b = b;
  rec.trials = trials;
  rec.seed = seed;
  rec.optimum_cost = truth.min_value;
  rec.optimum_count = truth.argmin.size();
  rec.p0b = point.p0b;
  rec.expected_repetitions = point.expected_repetitions;
  rec.effective_cost = point.c_eff;
  rec.c_inf = point.c_inf;
  rec.accuracy = point.accuracy;
  for (Bits x : truth.argmin) rec.optimum_probability += dist[x];
  const auto mode = static_cast<Bits>(std::max_element(dist.begin(), dist.end()) - dist.begin());
  rec.mode_is_optimum = cost.evaluate(mode) == truth.min_value;
  rec.schedule = params.schedule.value_or(AnnealingSchedule::default_for(cost));
  rec.schedule.validate();
  if (trials == 0) return rec;

  const double tolerance = 1e-12 * cost.range();
  for (std::uint64_t steps = params.min_steps; steps <= params.max_steps; steps *= 2) {
    std::vector<BaselineReport> runs(trials);
    parallel_for(trials, [&](std::size_t i) {
      runs[i] = simulated_annealing(cost, rec.schedule, steps, derive_seed(seed, i));
    });
    LadderRung rung;
    rung.steps = steps;
    rung.evaluations_per_run = steps + 1;
    double total = 0.0;
    for (const auto& r : runs) {
      total += r.best_cost;
      if (r.best_cost == truth.min_value) ++rung.optimum_hits;
    }
    rung.mean_best_cost = total / static_cast<double>(trials);
    if (!ens.degenerate()) {
      rung.accuracy = (point.c_inf - rung.mean_best_cost) / (point.c_inf - truth.min_value);
    }
    rec.ladder.push_back(rung);
    if (rung.mean_best_cost <= point.c_eff + tolerance) {
      rec.evaluations_to_match = rung.evaluations_per_run;
      break;
    }
    if (steps > params.max_steps / 2) break;
  }
  return rec;
}

}  // namespace qanneal
