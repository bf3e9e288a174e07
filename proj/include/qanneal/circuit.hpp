#pragma once

// The optimization circuit: for each control qubit c = 1..b apply H_c, U±_{cS}, H_c
// to the uniform search state, then post-select the all-zero control outcome.
//
// One H U± H round maps |x;0> to cos(theta)|x;0> + i sin(theta)|x;1> with
// theta = pi/2 * C_nor(x). The factor i on the flipped branch is part of the exact
// evolution, so after b rounds the amplitude of |x;J> is
//   cos^{b-w}(theta) (i sin(theta))^w / sqrt(N),   w = popcount(J).
// It cancels in every probability.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "qanneal/bits.hpp"
#include "qanneal/cost.hpp"
#include "qanneal/ensemble.hpp"
#include "qanneal/errors.hpp"
#include "qanneal/rng.hpp"
#include "qanneal/statevec.hpp"

namespace qanneal {

enum class CircuitStep {
  initial,           // |psi_0>, reported once before the first round
  first_hadamard,    // after H_c
  controlled_phase,  // after U±_{cS}
  second_hadamard,   // after the closing H_c
};

/// Observer called with the 0-based control index and the state after each step.
using StepObserver = std::function<void(unsigned control, CircuitStep step, const QuantumState&)>;

inline void check_gate_capacity(unsigned n, unsigned b) {
  if (n + b > max_qubits()) {
    throw CapacityError("gate-level simulation of " + std::to_string(n) + " search + " +
                        std::to_string(b) + " control qubits exceeds the amplitude cap of " +
                        std::to_string(max_qubits()) + "; use closed-form mode instead");
  }
}

/// Gate-level |psi_fin> from an explicit phase program over n search qubits.
inline QuantumState run_circuit(const PhaseProgram& program, unsigned n, unsigned b,
                                const StepObserver& observer = {}) {
  if (b == 0) throw InputError("the circuit needs at least one control qubit (b >= 1)");
  check_gate_capacity(n, b);
  auto state = uniform_superposition(n, b);
  if (observer) observer(0, CircuitStep::initial, state);
  for (unsigned c = 0; c < b; ++c) {
    const unsigned control = state.control_qubit(c);
    apply_hadamard(state, control);
    if (observer) observer(c, CircuitStep::first_hadamard, state);
    apply_u_pm(state, control, program);
    if (observer) observer(c, CircuitStep::controlled_phase, state);
    apply_hadamard(state, control);
    if (observer) observer(c, CircuitStep::second_hadamard, state);
  }
  return state;
}

inline QuantumState run_circuit(const CostFunction& cost, unsigned b,
                                const StepObserver& observer = {}) {
  return run_circuit(build_phase_tables(cost, +1), cost.n(), b, observer);
}

/// |psi_fin> written down directly from the normalized costs; b = 0 gives |S>.
inline QuantumState closed_form_final_state(const CostFunction& cost, unsigned b) {
  auto state = QuantumState::zeros(cost.n(), b);
  const std::size_t n_states = cost.state_count();
  const double amp = 1.0 / std::sqrt(static_cast<double>(n_states));
  static constexpr Amplitude kIPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::size_t patterns = std::size_t{1} << b;
  blocked_for_each(n_states, [&](std::size_t x) {
    const double theta = std::numbers::pi / 2.0 * cost.normalize(static_cast<Bits>(x));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (std::size_t j = 0; j < patterns; ++j) {
      const int w = popcount(j);
      const double mag = std::pow(c, static_cast<int>(b) - w) * std::pow(s, w);
      state[state.index(x, j)] = amp * mag * kIPowers[w % 4];
    }
  });
  return state;
}

struct PostSelection {
  QuantumState search;  // renormalized, n_control = 0
  double probability;   // weight of the all-zero control outcome
};

/// Projects onto |0...0> of the control register and renormalizes.
inline PostSelection postselect_zero(const QuantumState& state) {
  const std::size_t n_states = std::size_t{1} << state.n_search();
  std::vector<Amplitude> kept(state.amplitudes().begin(), state.amplitudes().begin() + n_states);
  const double weight =
      deterministic_sum(n_states, [&](std::size_t x) { return std::norm(kept[x]); });
  if (!(weight > 0.0)) throw DegeneracyError("all-zero control outcome has zero probability");
  const double scale = 1.0 / std::sqrt(weight);
  for (auto& a : kept) a *= scale;
  return {QuantumState(state.n_search(), 0, std::move(kept)), weight};
}

enum class SamplingMode { gate_level, closed_form };

inline std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::gate_level ? "gate" : "closed";
}

inline SamplingMode parse_sampling_mode(std::string_view s) {
  if (s == "gate" || s == "gate_level") return SamplingMode::gate_level;
  if (s == "closed" || s == "closed_form") return SamplingMode::closed_form;
  throw InputError("unknown sampling mode '" + std::string(s) + "' (expected gate or closed)");
}

struct RunOutcome {
  std::uint64_t repetitions = 1;  // executions of the deterministic part, >= 1
  Bits result = 0;
  double cost_value = 0;
};

inline constexpr std::uint64_t kDefaultMaxRepetitions = 1'000'000;

namespace detail {

inline std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = (acc += p[i]);
  return cdf;
}

inline std::size_t draw(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace detail

/// Repeat-until-success protocol for one (cost, b). The deterministic part yields
/// the same state on every execution, so it is simulated once at construction and
/// each trial only replays the measurements.
///
/// gate_level: each repetition draws a joint b-bit control outcome from the
///   simulated state; the first all-zero outcome is followed by a search-register
///   measurement of the post-selected state.
/// closed_form: repetitions are drawn from the geometric law with success
///   probability P0_b and the result from P_b; the control register is never built.
class Sampler {
 public:
  Sampler(const CostFunction& cost, unsigned b, SamplingMode mode,
          std::uint64_t max_repetitions = kDefaultMaxRepetitions)
      : cost_(cost), b_(b), mode_(mode), max_repetitions_(max_repetitions) {
    if (b == 0) throw InputError("sampling needs b >= 1");
    if (max_repetitions == 0) throw InputError("max repetitions must be positive");
    if (mode == SamplingMode::gate_level) {
      const auto final_state = run_circuit(cost, b);
      std::vector<unsigned> controls(b);
      for (unsigned c = 0; c < b; ++c) controls[c] = final_state.control_qubit(c);
      const auto control_marginal = marginal_probabilities(final_state, controls);
      control_cdf_ = detail::cumulative(control_marginal);
      const auto post = postselect_zero(final_state);
      success_probability_ = post.probability;
      result_distribution_.resize(post.search.size());
      for (std::size_t x = 0; x < post.search.size(); ++x) {
        result_distribution_[x] = std::norm(post.search[x]);
      }
    } else {
      const Ensemble ens(cost_);
      success_probability_ = ens.partition_function(b).p0b;
      result_distribution_ = ens.distribution(b);
    }
    result_cdf_ = detail::cumulative(result_distribution_);
  }

  unsigned b() const { return b_; }
  SamplingMode mode() const { return mode_; }
  double success_probability() const { return success_probability_; }
  const std::vector<double>& result_distribution() const { return result_distribution_; }

  /// One full run; throws RepetitionLimitError past the cutoff.
  RunOutcome operator()(Rng& rng) const {
    RunOutcome out;
    if (mode_ == SamplingMode::gate_level) {
      out.repetitions = 0;
      while (true) {
        if (out.repetitions == max_repetitions_) throw_limit();
        ++out.repetitions;
        if (detail::draw(control_cdf_, rng) == 0) break;
      }
    } else {
      out.repetitions = geometric(rng);
    }
    out.result = static_cast<Bits>(detail::draw(result_cdf_, rng));
    out.cost_value = cost_.evaluate(out.result);
    return out;
  }

 private:
  std::uint64_t geometric(Rng& rng) const {
    if (success_probability_ >= 1.0) return 1;
    if (!(success_probability_ > 0.0)) throw_limit();
    // Inverse CDF with u in (0, 1].
    const double u = 1.0 - rng.uniform();
    const double failures = std::floor(std::log(u) / std::log1p(-success_probability_));
    if (failures >= static_cast<double>(max_repetitions_)) throw_limit();
    return static_cast<std::uint64_t>(failures) + 1;
  }

  [[noreturn]] void throw_limit() const {
    throw RepetitionLimitError("post-selection did not succeed within " +
                               std::to_string(max_repetitions_) + " repetitions");
  }

  CostFunction cost_;
  unsigned b_;
  SamplingMode mode_;
  std::uint64_t max_repetitions_;
  double success_probability_ = 0;
  std::vector<double> result_distribution_;
  std::vector<double> result_cdf_;
  std::vector<double> control_cdf_;
};

inline RunOutcome sample_run(const CostFunction& cost, unsigned b, Rng& rng, SamplingMode mode,
                             std::uint64_t max_repetitions = kDefaultMaxRepetitions) {
  return Sampler(cost, b, mode, max_repetitions)(rng);
}

}  // namespace qanneal
