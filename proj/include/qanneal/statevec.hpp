#pragma once

// Dense state-vector engine for a search register of n qubits and a control
// register of b qubits.
//
// Index convention: basis index = search | (control << n_search). Search qubit i
// is global qubit i, control qubit c (0-based) is global qubit n_search + c.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qanneal/bits.hpp"
#include "qanneal/cost.hpp"
#include "qanneal/errors.hpp"
#include "qanneal/parallel.hpp"

namespace qanneal {

using Amplitude = std::complex<double>;

inline constexpr unsigned kDefaultMaxQubits = 26;

/// Amplitude cap: QANNEAL_MAX_QUBITS when set to a valid number, else 26.
inline unsigned max_qubits() {
  if (const char* env = std::getenv("QANNEAL_MAX_QUBITS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 40) return static_cast<unsigned>(v);
  }
  return kDefaultMaxQubits;
}

class QuantumState {
 public:
  QuantumState(unsigned n_search, unsigned n_control, std::vector<Amplitude> amplitudes)
      : n_search_(n_search), n_control_(n_control), amplitudes_(std::move(amplitudes)) {
    if (n_search + n_control > kMaxBits) throw CapacityError("register wider than 63 qubits");
    if (amplitudes_.size() != (std::size_t{1} << (n_search + n_control))) {
      throw InputError("amplitude count does not match register widths");
    }
  }

  /// All-zero amplitudes; guarded by max_qubits().
  static QuantumState zeros(unsigned n_search, unsigned n_control) {
    const unsigned total = n_search + n_control;
    if (total > max_qubits()) {
      throw CapacityError("state of " + std::to_string(total) + " qubits exceeds the amplitude cap of " +
                          std::to_string(max_qubits()) +
                          " (set QANNEAL_MAX_QUBITS or use closed-form mode)");
    }
    return QuantumState(n_search, n_control,
                        std::vector<Amplitude>(std::size_t{1} << total, Amplitude{}));
  }

  unsigned n_search() const { return n_search_; }
  unsigned n_control() const { return n_control_; }
  unsigned n_qubits() const { return n_search_ + n_control_; }
  std::size_t size() const { return amplitudes_.size(); }

  std::size_t index(Bits search, Bits control) const {
    return static_cast<std::size_t>(search | (control << n_search_));
  }
  unsigned control_qubit(unsigned c) const { return n_search_ + c; }

  std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  std::span<Amplitude> amplitudes() { return amplitudes_; }
  const Amplitude& operator[](std::size_t i) const { return amplitudes_[i]; }
  Amplitude& operator[](std::size_t i) { return amplitudes_[i]; }

  double norm_squared() const {
    return deterministic_sum(amplitudes_.size(),
                             [&](std::size_t i) { return std::norm(amplitudes_[i]); });
  }

 private:
  unsigned n_search_;
  unsigned n_control_;
  std::vector<Amplitude> amplitudes_;
};

/// Largest |a_i - b_i| over two states of identical layout.
inline double max_deviation(const QuantumState& a, const QuantumState& b) {
  if (a.n_search() != b.n_search() || a.n_control() != b.n_control()) {
    throw InputError("states have different layouts");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// Diagonal of a k-qubit phase gate; entry a applies to local assignment a.
struct PhaseTable {
  std::vector<Amplitude> phases;

  unsigned arity() const { return static_cast<unsigned>(std::countr_zero(phases.size())); }

  PhaseTable inverse() const {
    PhaseTable out{phases};
    for (auto& p : out.phases) p = std::conj(p);
    return out;
  }

  /// Elementwise integer power; power(-2) gives the G^{-2} table of U±.
  PhaseTable power(int exponent) const {
    PhaseTable out{phases};
    for (auto& p : out.phases) {
      const Amplitude base = exponent < 0 ? std::conj(p) : p;
      Amplitude acc{1.0, 0.0};
      for (int e = 0; e < std::abs(exponent); ++e) acc *= base;
      p = acc;
    }
    return out;
  }
};

struct DiagonalGate {
  std::vector<unsigned> qubits;
  PhaseTable table;
};

/// Ordered list of diagonal gates whose product realizes exp(±i pi/2 C_nor).
using PhaseProgram = std::vector<DiagonalGate>;

/// Amplitude 1/sqrt(2^n_search) on every |x; 0...0>.
inline QuantumState uniform_superposition(unsigned n_search, unsigned n_control) {
  if (n_search == 0) throw InputError("search register needs at least one qubit");
  auto state = QuantumState::zeros(n_search, n_control);
  const double a = 1.0 / std::sqrt(static_cast<double>(std::size_t{1} << n_search));
  for (std::size_t x = 0; x < (std::size_t{1} << n_search); ++x) state[x] = a;
  return state;
}

inline void check_qubit(const QuantumState& state, unsigned q) {
  if (q >= state.n_qubits()) {
    throw InputError("qubit index " + std::to_string(q) + " out of range for " +
                     std::to_string(state.n_qubits()) + "-qubit state");
  }
}

inline void apply_hadamard(QuantumState& state, unsigned qubit) {
  check_qubit(state, qubit);
  const std::size_t stride = std::size_t{1} << qubit;
  const double r = std::numbers::sqrt2 / 2.0;
  auto amps = state.amplitudes();
  // Iterate over indices with the target bit clear.
  blocked_for_each(state.size() / 2, [&](std::size_t k) {
    const std::size_t lo = ((k >> qubit) << (qubit + 1)) | (k & (stride - 1));
    const std::size_t hi = lo | stride;
    const Amplitude a0 = amps[lo];
    const Amplitude a1 = amps[hi];
    amps[lo] = r * (a0 + a1);
    amps[hi] = r * (a0 - a1);
  });
}

namespace detail {

inline void check_targets(const QuantumState& state, std::span<const unsigned> qubits,
                          const PhaseTable& table) {
  if (table.phases.size() != (std::size_t{1} << qubits.size())) {
    throw InputError("phase table arity does not match the number of target qubits");
  }
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    check_qubit(state, qubits[j]);
    for (std::size_t i = 0; i < j; ++i) {
      if (qubits[i] == qubits[j]) throw InputError("repeated target qubit");
    }
  }
}

}  // namespace detail

/// Multiplies each amplitude by the table entry selected by its bits on `qubits`.
inline void apply_diagonal(QuantumState& state, std::span<const unsigned> qubits,
                           const PhaseTable& table) {
  detail::check_targets(state, qubits, table);
  auto amps = state.amplitudes();
  blocked_for_each(state.size(), [&](std::size_t i) {
    amps[i] *= table.phases[gather_bits(i, qubits)];
  });
}

/// Applies the table only where `control` is 1.
inline void apply_controlled_diagonal(QuantumState& state, unsigned control,
                                      std::span<const unsigned> qubits, const PhaseTable& table) {
  detail::check_targets(state, qubits, table);
  check_qubit(state, control);
  for (unsigned q : qubits) {
    if (q == control) throw InputError("control qubit overlaps the target qubits");
  }
  const std::size_t stride = std::size_t{1} << control;
  auto amps = state.amplitudes();
  blocked_for_each(state.size() / 2, [&](std::size_t k) {
    const std::size_t i = ((k >> control) << (control + 1)) | (k & (stride - 1)) | stride;
    amps[i] *= table.phases[gather_bits(i, qubits)];
  });
}

/// One table per stored term plus one zero-arity table for the constant. The
/// c_min offset is split evenly across the M tables, so the product of all entries
/// selected by x equals exp(sign * i pi/2 * C_nor(x)).
inline PhaseProgram build_phase_tables(const CostFunction& cost, int sign = +1) {
  if (sign != 1 && sign != -1) throw InputError("phase sign must be +1 or -1");
  const double m = static_cast<double>(cost.terms().size() + 1);
  const double offset = cost.c_min() / m;
  const double scale = sign * std::numbers::pi / 2.0 / cost.range();
  auto phase = [&](double value) { return std::polar(1.0, scale * (value - offset)); };

  PhaseProgram program;
  program.reserve(cost.terms().size() + 1);
  program.push_back(DiagonalGate{{}, PhaseTable{{phase(cost.constant())}}});
  for (const auto& term : cost.terms()) {
    PhaseTable table;
    table.phases.reserve(term.values.size());
    for (double v : term.values) table.phases.push_back(phase(v));
    program.push_back(DiagonalGate{term.qubits, std::move(table)});
  }
  return program;
}

/// Product of the entries of every gate selected by the search assignment x.
inline Amplitude composed_phase(const PhaseProgram& program, Bits x) {
  Amplitude p{1.0, 0.0};
  for (const auto& gate : program) p *= gate.table.phases[gather_bits(x, gate.qubits)];
  return p;
}

/// U± on (control, search): U on the control-0 branch, U^-1 on the control-1 branch,
/// as the product over gates of G followed by the controlled G^-2.
inline void apply_u_pm(QuantumState& state, unsigned control, const PhaseProgram& program) {
  if (control < state.n_search()) throw InputError("U± control must be a control-register qubit");
  for (const auto& gate : program) {
    for (unsigned q : gate.qubits) {
      if (q >= state.n_search()) throw InputError("phase gate targets a non-search qubit");
    }
    apply_diagonal(state, gate.qubits, gate.table);
    apply_controlled_diagonal(state, control, gate.qubits, gate.table.power(-2));
  }
}

inline void apply_u_pm(QuantumState& state, unsigned control, const CostFunction& cost) {
  if (cost.n() != state.n_search()) {
    throw InputError("cost bit count does not match the search register");
  }
  apply_u_pm(state, control, build_phase_tables(cost, +1));
}

/// Born-rule marginal over `subset`; entry a has subset[j] equal to bit j of a.
inline std::vector<double> marginal_probabilities(const QuantumState& state,
                                                  std::span<const unsigned> subset) {
  for (std::size_t j = 0; j < subset.size(); ++j) {
    check_qubit(state, subset[j]);
    for (std::size_t i = 0; i < j; ++i) {
      if (subset[i] == subset[j]) throw InputError("repeated qubit in marginal subset");
    }
  }
  const std::size_t outcomes = std::size_t{1} << subset.size();
  auto amps = state.amplitudes();
  return blocked_reduce<std::vector<double>>(
      state.size(), std::vector<double>(outcomes, 0.0),
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> local(outcomes, 0.0);
        for (std::size_t i = begin; i < end; ++i) local[gather_bits(i, subset)] += std::norm(amps[i]);
        return local;
      },
      [](std::vector<double> a, const std::vector<double>& b) {
        for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
        return a;
      });
}

/// Debug dump: basis-index order, each amplitude as little-endian float64 real
/// then imaginary part. Not a stable interchange format.
inline void write_amplitudes(std::ostream& out, const QuantumState& state) {
  static_assert(std::endian::native == std::endian::little, "dump assumes a little-endian host");
  for (const auto& a : state.amplitudes()) {
    const double parts[2] = {a.real(), a.imag()};
    out.write(reinterpret_cast<const char*>(parts), sizeof(parts));
  }
}

inline QuantumState read_amplitudes(std::istream& in, unsigned n_search, unsigned n_control) {
  auto state = QuantumState::zeros(n_search, n_control);
  for (auto& a : state.amplitudes()) {
    double parts[2];
    if (!in.read(reinterpret_cast<char*>(parts), sizeof(parts))) {
      throw InputError("amplitude dump is truncated");
    }
    a = Amplitude{parts[0], parts[1]};
  }
  return state;
}

}  // namespace qanneal
