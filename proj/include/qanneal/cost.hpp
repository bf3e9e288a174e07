#pragma once

// k-local cost functions over n bits and the random graph-partitioning family.
//
// A cost is C(q) = constant + sum over terms of values[q restricted to term.qubits].
// Every CostFunction carries strict bounds c_min < C(q) < c_max, which fix the
// affine map onto the open unit interval used by the phase gates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qanneal/bits.hpp"
#include "qanneal/errors.hpp"
#include "qanneal/rng.hpp"

namespace qanneal {

/// One k-local contribution. values[a] is the cost when the term's bits take the
/// joint assignment a, with qubits[j] mapped to bit j of a.
struct LocalTerm {
  std::vector<unsigned> qubits;
  std::vector<double> values;

  unsigned arity() const { return static_cast<unsigned>(qubits.size()); }

  double at(Bits x) const { return values[gather_bits(x, qubits)]; }

  double min_value() const { return *std::min_element(values.begin(), values.end()); }
  double max_value() const { return *std::max_element(values.begin(), values.end()); }

  bool operator==(const LocalTerm&) const = default;
};

struct CostBounds {
  double c_min;
  double c_max;
};

/// Bits for which a user-supplied bound pair is verified by exhaustive evaluation.
inline constexpr unsigned kBruteForceBoundCheckBits = 20;

/// Default strictness margin: 0.5e-3 of the loose span, floored at 1e-9 relative to
/// the cost's magnitude so that the margin survives rounding.
inline double default_margin(double loose_min, double loose_max) {
  const double scale = std::max({1.0, std::abs(loose_min), std::abs(loose_max)});
  return std::max(0.5 * (loose_max - loose_min) * 1e-3, 1e-9 * scale);
}

namespace detail {

inline void check_finite(const LocalTerm& term) {
  for (double v : term.values) {
    if (!std::isfinite(v)) throw InputError("cost term contains a non-finite value");
  }
}

// Loose bounds, summed in the same order as CostFunction::evaluate so that
// monotone rounding keeps every evaluation inside them.
inline CostBounds loose_bounds(double constant, const std::vector<LocalTerm>& terms) {
  double lo = constant;
  double hi = constant;
  for (const auto& t : terms) {
    lo += t.min_value();
    hi += t.max_value();
  }
  return {lo, hi};
}

// Reorders a term's qubits ascending and permutes its table to match.
inline LocalTerm sorted_term(const LocalTerm& term) {
  const unsigned k = term.arity();
  std::vector<unsigned> order(k);
  std::iota(order.begin(), order.end(), 0U);
  std::sort(order.begin(), order.end(),
            [&](unsigned a, unsigned b) { return term.qubits[a] < term.qubits[b]; });
  LocalTerm out;
  out.qubits.resize(k);
  for (unsigned j = 0; j < k; ++j) out.qubits[j] = term.qubits[order[j]];
  out.values.resize(term.values.size());
  for (std::size_t a = 0; a < term.values.size(); ++a) {
    std::size_t old_index = 0;
    for (unsigned j = 0; j < k; ++j) {
      old_index |= ((a >> j) & 1U) << order[j];
    }
    out.values[a] = term.values[old_index];
  }
  return out;
}

}  // namespace detail

/// Strict bounds from the per-term extremes plus an additive margin (margin > 0).
inline CostBounds derive_bounds(double constant, const std::vector<LocalTerm>& terms,
                                std::optional<double> margin = std::nullopt) {
  if (!std::isfinite(constant)) throw InputError("cost constant is not finite");
  for (const auto& t : terms) detail::check_finite(t);
  const auto loose = detail::loose_bounds(constant, terms);
  const double m = margin.value_or(default_margin(loose.c_min, loose.c_max));
  if (!(m > 0.0) || !std::isfinite(m)) throw InputError("bound margin must be positive and finite");
  return {loose.c_min - m, loose.c_max + m};
}

class CostFunction {
 public:
  /// Validates and canonicalizes the terms: qubit lists are sorted, terms over
  /// the same qubit set are merged and zero-arity terms fold into the constant.
  /// The bounds must be strict for every assignment; they are accepted when they
  /// enclose the loose per-term bounds, or after exhaustive checking for n <= 20.
  CostFunction(unsigned n, double constant, std::vector<LocalTerm> terms, double c_min,
               double c_max)
      : n_(n), constant_(constant), c_min_(c_min), c_max_(c_max) {
    if (n == 0 || n > kMaxBits) throw InputError("cost bit count must be in [1, 63]");
    if (!std::isfinite(constant)) throw InputError("cost constant is not finite");
    canonicalize(std::move(terms));
    validate_bounds();
  }

  /// Same, with bounds from derive_bounds.
  static CostFunction with_derived_bounds(unsigned n, double constant, std::vector<LocalTerm> terms,
                                          std::optional<double> margin = std::nullopt) {
    // Canonicalize first so the bounds are summed over the stored terms.
    CostFunction probe(n, constant, std::move(terms), -INFINITY, INFINITY, Unchecked{});
    const auto b = derive_bounds(probe.constant_, probe.terms_, margin);
    probe.c_min_ = b.c_min;
    probe.c_max_ = b.c_max;
    probe.validate_bounds();
    return probe;
  }

  unsigned n() const { return n_; }
  double constant() const { return constant_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  double c_min() const { return c_min_; }
  double c_max() const { return c_max_; }
  double range() const { return c_max_ - c_min_; }
  std::size_t state_count() const { return std::size_t{1} << n_; }

  unsigned max_arity() const {
    unsigned m = 0;
    for (const auto& t : terms_) m = std::max(m, t.arity());
    return m;
  }

  double evaluate(Bits x) const {
    double c = constant_;
    for (const auto& t : terms_) c += t.at(x);
    return c;
  }

  double evaluate(std::string_view bits) const {
    if (bits.size() != n_) {
      throw InputError("bitstring length " + std::to_string(bits.size()) +
                       " does not match cost bit count " + std::to_string(n_));
    }
    return evaluate(parse_bitstring(bits));
  }

  /// Maps a cost value into (0, 1); values on or outside the bounds are rejected.
  double normalize_value(double c) const {
    if (!(c > c_min_ && c < c_max_)) {
      throw InputError("cost value " + std::to_string(c) + " is not strictly inside (" +
                       std::to_string(c_min_) + ", " + std::to_string(c_max_) + ")");
    }
    return (c - c_min_) / (c_max_ - c_min_);
  }

  double normalize(Bits x) const { return normalize_value(evaluate(x)); }
  double normalize(std::string_view bits) const { return normalize_value(evaluate(bits)); }

 private:
  struct Unchecked {};

  CostFunction(unsigned n, double constant, std::vector<LocalTerm> terms, double c_min, double c_max,
               Unchecked)
      : n_(n), constant_(constant), c_min_(c_min), c_max_(c_max) {
    if (n == 0 || n > kMaxBits) throw InputError("cost bit count must be in [1, 63]");
    if (!std::isfinite(constant)) throw InputError("cost constant is not finite");
    canonicalize(std::move(terms));
  }

  void canonicalize(std::vector<LocalTerm> terms) {
    std::vector<LocalTerm> sorted;
    sorted.reserve(terms.size());
    for (auto& t : terms) {
      if (t.qubits.size() > n_) throw InputError("cost term arity exceeds bit count");
      if (t.values.size() != (std::size_t{1} << t.qubits.size())) {
        throw InputError("cost term table must have 2^k entries");
      }
      detail::check_finite(t);
      for (unsigned q : t.qubits) {
        if (q >= n_) throw InputError("cost term qubit index out of range");
      }
      if (t.qubits.empty()) {
        constant_ += t.values[0];
        continue;
      }
      LocalTerm s = detail::sorted_term(t);
      if (std::adjacent_find(s.qubits.begin(), s.qubits.end()) != s.qubits.end()) {
        throw InputError("cost term repeats a qubit index");
      }
      sorted.push_back(std::move(s));
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const LocalTerm& a, const LocalTerm& b) {
      return a.qubits < b.qubits;
    });
    for (auto& t : sorted) {
      if (!terms_.empty() && terms_.back().qubits == t.qubits) {
        auto& dst = terms_.back().values;
        for (std::size_t a = 0; a < dst.size(); ++a) dst[a] += t.values[a];
      } else {
        terms_.push_back(std::move(t));
      }
    }
  }

  void validate_bounds() const {
    if (!std::isfinite(c_min_) || !std::isfinite(c_max_) || !(c_min_ < c_max_)) {
      throw InputError("cost bounds must be finite with c_min < c_max");
    }
    const auto loose = detail::loose_bounds(constant_, terms_);
    if (c_min_ < loose.c_min && c_max_ > loose.c_max) return;
    if (n_ > kBruteForceBoundCheckBits) {
      throw InputError("cost bounds do not enclose the per-term bounds and n is too large to verify");
    }
    for (Bits x = 0; x < (Bits{1} << n_); ++x) {
      const double c = evaluate(x);
      if (!(c > c_min_ && c < c_max_)) {
        throw InputError("cost bounds are not strict: C(" + to_bitstring(x, n_) +
                         ") = " + std::to_string(c));
      }
    }
  }

  unsigned n_;
  double constant_;
  std::vector<LocalTerm> terms_;
  double c_min_;
  double c_max_;
};

/// Random graph on an even number of vertices with the partitioning parameters.
struct GraphPartitionInstance {
  unsigned v = 0;
  std::vector<std::pair<unsigned, unsigned>> edges;  // i < j, sorted, unique
  double j = 1.0;
  double lambda = 0.0;
  double p = 0.0;

  bool operator==(const GraphPartitionInstance&) const = default;
};

/// Normalizes edge orientation and order, then checks the instance invariants.
inline GraphPartitionInstance make_graph_instance(unsigned v,
                                                  std::vector<std::pair<unsigned, unsigned>> edges,
                                                  double j, double lambda, double p) {
  if (v == 0 || v % 2 != 0) throw InputError("graph vertex count must be even and positive");
  if (v > kMaxBits) throw InputError("graph vertex count exceeds 63");
  if (!(j > 0.0) || !std::isfinite(j)) throw InputError("coupling J must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must be in [0, 1]");
  for (auto& [a, b] : edges) {
    if (a >= v || b >= v) throw InputError("edge endpoint out of range");
    if (a == b) throw InputError("self-loop in edge list");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw InputError("duplicate edge in edge list");
  }
  return GraphPartitionInstance{v, std::move(edges), j, lambda, p};
}

/// Each of the v(v-1)/2 vertex pairs is an edge independently with probability p.
inline GraphPartitionInstance random_graph(unsigned v, double p, std::uint64_t seed,
                                           double j = 1.0, double lambda = 0.0) {
  if (v == 0 || v % 2 != 0) throw InputError("graph vertex count must be even and positive");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must be in [0, 1]");
  Rng rng(seed);
  std::vector<std::pair<unsigned, unsigned>> edges;
  for (unsigned a = 0; a < v; ++a) {
    for (unsigned b = a + 1; b < v; ++b) {
      if (rng.bernoulli(p)) edges.emplace_back(a, b);
    }
  }
  return make_graph_instance(v, std::move(edges), j, lambda, p);
}

/// Cost v(v-1)p/4 - (1/2J) sum_{i<j} J_ij s_i s_j + (lambda/2)(sum_i s_i)^2 with s = 2q - 1.
///
/// Expanding the square gives lambda*v/2 plus lambda*s_i*s_j for every pair, so each
/// pair with a nonzero coefficient becomes one 2-local table over (q_i, q_j) holding
/// coef * s_i * s_j, and everything else lands in the constant.
inline CostFunction graph_partition_cost(const GraphPartitionInstance& inst) {
  const auto checked =
      make_graph_instance(inst.v, inst.edges, inst.j, inst.lambda, inst.p);  // validates
  const unsigned v = checked.v;
  std::vector<std::vector<bool>> adjacent(v, std::vector<bool>(v, false));
  for (const auto& [a, b] : checked.edges) adjacent[a][b] = true;

  const double constant =
      static_cast<double>(v) * (v - 1) * checked.p / 4.0 + checked.lambda * v / 2.0;
  std::vector<LocalTerm> terms;
  for (unsigned a = 0; a < v; ++a) {
    for (unsigned b = a + 1; b < v; ++b) {
      // J_ij / (2J) is 1/2 on edges.
      const double coef = (adjacent[a][b] ? -0.5 : 0.0) + checked.lambda;
      if (coef == 0.0) continue;
      // Table index bit0 = q_a, bit1 = q_b; s_a s_b = +1 when the bits agree.
      terms.push_back(LocalTerm{{a, b}, {coef, -coef, -coef, coef}});
    }
  }
  return CostFunction::with_derived_bounds(v, constant, std::move(terms));
}

/// Reproducible random cost: every subset of 1..m bits becomes a term with
/// probability term_density, with table entries uniform in [-1, 1).
inline CostFunction random_local_cost(unsigned n, unsigned m, double term_density,
                                      std::uint64_t seed) {
  if (n == 0 || n > kMaxBits) throw InputError("bit count must be in [1, 63]");
  if (m == 0 || m > n) throw InputError("term arity m must satisfy 1 <= m <= n");
  if (!(term_density >= 0.0 && term_density <= 1.0)) {
    throw InputError("term density must be in [0, 1]");
  }
  Rng rng(seed);
  std::vector<LocalTerm> terms;
  for (unsigned k = 1; k <= m; ++k) {
    // Lexicographic k-combinations of [0, n).
    std::vector<unsigned> idx(k);
    std::iota(idx.begin(), idx.end(), 0U);
    while (true) {
      if (rng.bernoulli(term_density)) {
        LocalTerm t{idx, std::vector<double>(std::size_t{1} << k)};
        for (double& val : t.values) val = rng.uniform(-1.0, 1.0);
        terms.push_back(std::move(t));
      }
      int pos = static_cast<int>(k) - 1;
      while (pos >= 0 && idx[pos] == n - k + static_cast<unsigned>(pos)) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (unsigned q = static_cast<unsigned>(pos) + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
  }
  return CostFunction::with_derived_bounds(n, 0.0, std::move(terms));
}

}  // namespace qanneal
