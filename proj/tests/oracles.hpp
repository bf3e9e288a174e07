#pragma once

// Independent reference computations for the tests. Nothing here goes through
// the phase tables, the gate engine or the ensemble class.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qanneal/bits.hpp"
#include "qanneal/cost.hpp"
#include "qanneal/statevec.hpp"

namespace oracle {

using qanneal::Amplitude;
using qanneal::Bits;

inline int spin(Bits x, unsigned i) { return qanneal::bit_at(x, i) ? 1 : -1; }

inline int cut_size(const qanneal::GraphPartitionInstance& g, Bits x) {
  int cut = 0;
  for (const auto& [a, b] : g.edges) cut += spin(x, a) != spin(x, b);
  return cut;
}

/// v(v-1)p/4 - (1/2) sum_{edges} s_i s_j + (lambda/2)(sum s_i)^2, straight from the edge set.
inline double direct_graph_cost(const qanneal::GraphPartitionInstance& g, Bits x) {
  double c = g.v * (g.v - 1.0) * g.p / 4.0;
  for (const auto& [a, b] : g.edges) c -= 0.5 * spin(x, a) * spin(x, b);
  int total = 0;
  for (unsigned i = 0; i < g.v; ++i) total += spin(x, i);
  return c + g.lambda / 2.0 * total * total;
}

inline double c_nor(const qanneal::CostFunction& cost, Bits x) {
  return (cost.evaluate(x) - cost.c_min()) / (cost.c_max() - cost.c_min());
}

inline double theta(const qanneal::CostFunction& cost, Bits x) {
  return std::numbers::pi / 2.0 * c_nor(cost, x);
}

inline std::size_t index(unsigned n, Bits x, Bits control) {
  return static_cast<std::size_t>(x | (control << n));
}

// The states after each gate of a b = 1 round, built literally from the cost
// values. The control-1 branch of psi3 carries the factor i that the exact
// evolution produces.

inline std::vector<Amplitude> psi0(const qanneal::CostFunction& cost, unsigned b) {
  const unsigned n = cost.n();
  std::vector<Amplitude> s(std::size_t{1} << (n + b));
  const double a = 1.0 / std::sqrt(std::pow(2.0, n));
  for (Bits x = 0; x < (Bits{1} << n); ++x) s[index(n, x, 0)] = a;
  return s;
}

inline std::vector<Amplitude> psi1(const qanneal::CostFunction& cost, unsigned b) {
  const unsigned n = cost.n();
  std::vector<Amplitude> s(std::size_t{1} << (n + b));
  const double a = 1.0 / std::sqrt(2.0 * std::pow(2.0, n));
  for (Bits x = 0; x < (Bits{1} << n); ++x) {
    s[index(n, x, 0)] = a;
    s[index(n, x, 1)] = a;
  }
  return s;
}

inline std::vector<Amplitude> psi2(const qanneal::CostFunction& cost, unsigned b) {
  const unsigned n = cost.n();
  std::vector<Amplitude> s(std::size_t{1} << (n + b));
  const double a = 1.0 / std::sqrt(2.0 * std::pow(2.0, n));
  for (Bits x = 0; x < (Bits{1} << n); ++x) {
    s[index(n, x, 0)] = a * std::polar(1.0, theta(cost, x));
    s[index(n, x, 1)] = a * std::polar(1.0, -theta(cost, x));
  }
  return s;
}

inline std::vector<Amplitude> psi3(const qanneal::CostFunction& cost, unsigned b) {
  const unsigned n = cost.n();
  std::vector<Amplitude> s(std::size_t{1} << (n + b));
  const double a = 1.0 / std::sqrt(std::pow(2.0, n));
  for (Bits x = 0; x < (Bits{1} << n); ++x) {
    s[index(n, x, 0)] = a * std::cos(theta(cost, x));
    s[index(n, x, 1)] = a * Amplitude{0.0, std::sin(theta(cost, x))};
  }
  return s;
}

/// Real cos/sin product form, without the i^w phase on the flipped branches.
inline std::vector<double> psi_fin_printed(const qanneal::CostFunction& cost, unsigned b) {
  const unsigned n = cost.n();
  std::vector<double> s(std::size_t{1} << (n + b));
  const double a = 1.0 / std::sqrt(std::pow(2.0, n));
  for (Bits x = 0; x < (Bits{1} << n); ++x) {
    for (Bits j = 0; j < (Bits{1} << b); ++j) {
      const int w = qanneal::popcount(j);
      s[index(n, x, j)] =
          a * std::pow(std::cos(theta(cost, x)), b - w) * std::pow(std::sin(theta(cost, x)), w);
    }
  }
  return s;
}

inline double max_deviation(const qanneal::QuantumState& s, const std::vector<Amplitude>& ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(s[i] - ref[i]));
  return worst;
}

/// Post-selected distribution cos^{2b}(theta)/sum, by direct enumeration.
inline std::vector<double> postselected(const qanneal::CostFunction& cost, double b) {
  std::vector<double> p(cost.state_count());
  double total = 0.0;
  for (Bits x = 0; x < p.size(); ++x) total += p[x] = std::pow(std::cos(theta(cost, x)), 2.0 * b);
  for (double& v : p) v /= total;
  return p;
}

inline double p0b(const qanneal::CostFunction& cost, double b) {
  double total = 0.0;
  for (Bits x = 0; x < cost.state_count(); ++x) total += std::pow(std::cos(theta(cost, x)), 2.0 * b);
  return total / static_cast<double>(cost.state_count());
}

/// Pauli X on one qubit (test-only helper).
inline void apply_x(qanneal::QuantumState& s, unsigned q) {
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((i & bit) == 0) std::swap(s[i], s[i | bit]);
  }
}

/// The n = 1 example: one 1-local term C(0) = 0, C(1) = 1 with bounds (-0.5, 1.5),
/// so C_nor = 0.25 and 0.75.
inline qanneal::CostFunction two_state_example() {
  return qanneal::CostFunction(1, 0.0, {qanneal::LocalTerm{{0}, {0.0, 1.0}}}, -0.5, 1.5);
}

inline qanneal::GraphPartitionInstance k4(double lambda) {
  return qanneal::make_graph_instance(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, 1.0,
                                      lambda, 1.0);
}

}  // namespace oracle
