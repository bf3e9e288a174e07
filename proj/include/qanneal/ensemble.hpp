#pragma once

// Effective thermodynamics of the post-selected output distribution.
//
// With theta(x) = pi/2 * C_nor(x), post-selection on an all-zero control register of
// b qubits yields P_b(x) proportional to cos^{2b} theta(x) = exp(-b E(x)) with
// E(x) = -2 log cos theta(x). The ensemble is Boltzmann at temperature t = 1/b, and
// b is treated as a continuous positive real here.
//
// Free energy is normalized against Z(b = 0) = N:  Z = N exp(-b F), i.e.
// F = -(1/b) log P0_b. Consequently S = -dF/dt = (U - F)/t equals the Gibbs entropy
// minus log N and lies in [-log N, 0]; ThermoPoint also reports the Gibbs entropy.
//
// Sums over states are evaluated in shifted log form (relative to the ground
// level) so that large b never underflows, and with expm1/log1p so that small b
// keeps full relative precision in F.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qanneal/cost.hpp"
#include "qanneal/errors.hpp"
#include "qanneal/parallel.hpp"

namespace qanneal {

inline constexpr unsigned kDefaultEnumerationCap = 24;

/// Relative tolerance for S = (U - F)/t against the central difference of F.
inline constexpr double kEntropyCrossCheckTolerance = 1e-6;
/// Relative step of the central difference in t.
inline constexpr double kEntropyFiniteDifferenceStep = 1e-4;

/// E = -2 log cos(pi/2 * c_nor).
inline double effective_energy(double c_nor) {
  return -2.0 * std::log(std::cos(std::numbers::pi / 2.0 * c_nor));
}

enum class EnergyBranch { low, high };

/// Leading-order E: pi^2/4 c^2 for c << 1, log(4 / (pi^2 (1-c)^2)) for 1 - c << 1.
inline double asymptotic_energy(double c_nor, EnergyBranch branch) {
  if (!(c_nor > 0.0 && c_nor < 1.0)) throw InputError("normalized cost must be in (0, 1)");
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (branch == EnergyBranch::low) return pi2 / 4.0 * c_nor * c_nor;
  const double gap = 1.0 - c_nor;
  return std::log(4.0 / (pi2 * gap * gap));
}

struct PartitionFunction {
  double z;          // sum_k exp(-b E_k) = N * P0_b
  double p0b;        // probability of the all-zero control outcome
  double log_p0b;    // exact even when p0b underflows
};

/// One effective-temperature point.
struct ThermoPoint {
  double t = 0;
  double b = 0;
  double f = 0;                  // free energy, Z = N exp(-b F)
  double u = 0;                  // <E>_t
  double s = 0;                  // (U - F)/t, reported entropy
  double s_finite_difference = 0;  // -dF/dt by central difference
  double s_gibbs = 0;            // s + log N, in [0, log N]
  double c_eff_nor = 0;          // (2/pi) arccos exp(-F/2)
  double c_eff = 0;              // c_min + (c_max - c_min) c_eff_nor
  double c_inf = 0;              // effective cost at t = infinity
  double c_opt = 0;              // true minimum cost
  double delta = 0;              // c_inf - c_eff
  std::optional<double> accuracy;  // delta / (c_inf - c_opt); empty when degenerate
  double p0b = 0;
  double expected_repetitions = 0;  // 1 / P0_b

  double identity_residual() const { return std::abs(f - (u - t * s)); }

  double entropy_relative_gap() const {
    const double scale = std::max(std::abs(s), std::abs(s_finite_difference));
    return scale == 0.0 ? 0.0 : std::abs(s - s_finite_difference) / scale;
  }

  bool entropy_consistent() const { return entropy_relative_gap() <= kEntropyCrossCheckTolerance; }
};

struct SweepDiagnostics {
  bool accuracy_nondecreasing = true;
  bool free_energy_nonincreasing = true;
};

/// Exhaustively enumerated ensemble of a cost function.
class Ensemble {
 public:
  explicit Ensemble(const CostFunction& cost, unsigned cap = kDefaultEnumerationCap)
      : n_(cost.n()), c_min_(cost.c_min()), c_max_(cost.c_max()) {
    if (cost.n() > cap) {
      throw CapacityError("exhaustive enumeration of " + std::to_string(cost.n()) +
                          " bits exceeds the cap of " + std::to_string(cap));
    }
    const std::size_t count = cost.state_count();
    c_nor_.resize(count);
    energies_.resize(count);
    std::vector<double> costs(count);
    blocked_for_each(count, [&](std::size_t x) {
      costs[x] = cost.evaluate(static_cast<Bits>(x));
      c_nor_[x] = cost.normalize_value(costs[x]);
      energies_[x] = effective_energy(c_nor_[x]);
    });
    const auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
    min_cost_ = *lo;
    max_cost_ = *hi;
    min_energy_ = *std::min_element(energies_.begin(), energies_.end());
    mean_energy_ =
        deterministic_sum(count, [&](std::size_t k) { return energies_[k]; }) / count;
  }

  unsigned n() const { return n_; }
  std::size_t state_count() const { return energies_.size(); }
  double c_min() const { return c_min_; }
  double c_max() const { return c_max_; }
  std::span<const double> normalized_costs() const { return c_nor_; }
  std::span<const double> energies() const { return energies_; }
  double min_energy() const { return min_energy_; }
  double mean_energy() const { return mean_energy_; }
  double min_cost() const { return min_cost_; }
  double max_cost() const { return max_cost_; }

  /// All states share one cost, so the accuracy denominator vanishes.
  bool degenerate() const { return max_cost_ - min_cost_ <= 1e-12 * (c_max_ - c_min_); }

  /// log P0_b for b >= 0.
  double log_p0b(double b) const {
    check_b(b, true);
    if (b == 0.0) return 0.0;
    const double shifted = deterministic_sum(state_count(), [&](std::size_t k) {
      return std::expm1(-b * (energies_[k] - min_energy_));
    });
    return -b * min_energy_ + std::log1p(shifted / static_cast<double>(state_count()));
  }

  PartitionFunction partition_function(double b) const {
    const double lp = log_p0b(b);
    const double p0 = std::exp(lp);
    return {static_cast<double>(state_count()) * p0, p0, lp};
  }

  /// P0_b evaluated directly as (1/N) sum cos^{2b}(pi/2 C_nor), without the energy route.
  double p0b_cosine(double b) const {
    check_b(b, true);
    const double s = deterministic_sum(state_count(), [&](std::size_t k) {
      return std::pow(std::cos(std::numbers::pi / 2.0 * c_nor_[k]), 2.0 * b);
    });
    return s / static_cast<double>(state_count());
  }

  /// P_b(x) = exp(-b E(x)) / Z.
  std::vector<double> distribution(double b) const {
    check_b(b, true);
    std::vector<double> w(state_count());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(-b * (energies_[k] - min_energy_));
    normalize_in_place(w);
    return w;
  }

  /// P_b(x) = cos^{2b}(pi/2 C_nor(x)) / (N P0_b), scaled by the largest cosine.
  std::vector<double> distribution_cosine(double b) const {
    check_b(b, true);
    std::vector<double> w(state_count());
    double top = 0.0;
    for (double c : c_nor_) top = std::max(top, std::cos(std::numbers::pi / 2.0 * c));
    for (std::size_t k = 0; k < w.size(); ++k) {
      w[k] = std::pow(std::cos(std::numbers::pi / 2.0 * c_nor_[k]) / top, 2.0 * b);
    }
    normalize_in_place(w);
    return w;
  }

  /// F = -(1/b) log P0_b, b > 0.
  double free_energy(double b) const {
    check_b(b, false);
    const double shifted = deterministic_sum(state_count(), [&](std::size_t k) {
      return std::expm1(-b * (energies_[k] - min_energy_));
    });
    return min_energy_ - std::log1p(shifted / static_cast<double>(state_count())) / b;
  }

  /// U = <E> under P_b.
  double internal_energy(double b) const {
    check_b(b, true);
    using Pair = std::pair<double, double>;
    const auto [num, den] = blocked_reduce<Pair>(
        state_count(), Pair{0.0, 0.0},
        [&](std::size_t begin, std::size_t end) {
          Pair acc{0.0, 0.0};
          for (std::size_t k = begin; k < end; ++k) {
            const double d = energies_[k] - min_energy_;
            const double w = std::exp(-b * d);
            acc.first += d * w;
            acc.second += w;
          }
          return acc;
        },
        [](Pair a, Pair c) { return Pair{a.first + c.first, a.second + c.second}; });
    return min_energy_ + num / den;
  }

  /// Normalized cost whose single-level ensemble has free energy F.
  static double effective_cost_nor(double free_energy) {
    return 2.0 / std::numbers::pi * std::acos(std::exp(-free_energy / 2.0));
  }

  double denormalize(double c_nor) const { return c_min_ + (c_max_ - c_min_) * c_nor; }

  /// Effective cost in the t -> infinity limit, where F -> <E>_uniform.
  double c_inf() const { return denormalize(effective_cost_nor(mean_energy_)); }

  ThermoPoint thermo_point(double t) const {
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("effective temperature must be positive");
    ThermoPoint pt;
    pt.t = t;
    pt.b = 1.0 / t;
    pt.f = free_energy(pt.b);
    pt.u = internal_energy(pt.b);
    pt.s = (pt.u - pt.f) / t;
    const double h = kEntropyFiniteDifferenceStep * t;
    pt.s_finite_difference = -(free_energy(1.0 / (t + h)) - free_energy(1.0 / (t - h))) / (2.0 * h);
    pt.s_gibbs = pt.s + std::log(static_cast<double>(state_count()));
    pt.c_eff_nor = effective_cost_nor(pt.f);
    pt.c_eff = denormalize(pt.c_eff_nor);
    pt.c_inf = c_inf();
    pt.c_opt = min_cost_;
    pt.delta = pt.c_inf - pt.c_eff;
    if (!degenerate()) pt.accuracy = pt.delta / (pt.c_inf - pt.c_opt);
    const double lp = log_p0b(pt.b);
    pt.p0b = std::exp(lp);
    pt.expected_repetitions = std::exp(-lp);
    return pt;
  }

  /// |P0_b - cos^{2b}(pi/2 * C_eff_nor(b))| with P0_b from the cosine route.
  double consistency_p0b(double b) const {
    check_b(b, false);
    const double c = effective_cost_nor(free_energy(b));
    return std::abs(p0b_cosine(b) - std::pow(std::cos(std::numbers::pi / 2.0 * c), 2.0 * b));
  }

  std::vector<ThermoPoint> sweep(std::span<const double> b_values) const {
    std::vector<ThermoPoint> out;
    out.reserve(b_values.size());
    for (double b : b_values) {
      check_b(b, false);
      out.push_back(thermo_point(1.0 / b));
    }
    return out;
  }

  /// Monotonicity of a sweep ordered by increasing b.
  static SweepDiagnostics diagnose(std::span<const ThermoPoint> points, double slack = 1e-12) {
    SweepDiagnostics d;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (points[i].b < points[i - 1].b) continue;
      if (points[i].f > points[i - 1].f + slack) d.free_energy_nonincreasing = false;
      if (points[i].accuracy && points[i - 1].accuracy &&
          *points[i].accuracy < *points[i - 1].accuracy - slack) {
        d.accuracy_nondecreasing = false;
      }
    }
    return d;
  }

 private:
  static void check_b(double b, bool allow_zero) {
    if (!std::isfinite(b) || b < 0.0 || (!allow_zero && b == 0.0)) {
      throw InputError(allow_zero ? "b must be finite and >= 0" : "b must be finite and > 0");
    }
  }

  static void normalize_in_place(std::vector<double>& w) {
    const double total = deterministic_sum(w.size(), [&](std::size_t k) { return w[k]; });
    for (double& v : w) v /= total;
  }

  unsigned n_;
  double c_min_;
  double c_max_;
  std::vector<double> c_nor_;
  std::vector<double> energies_;
  double min_cost_ = 0;
  double max_cost_ = 0;
  double min_energy_ = 0;
  double mean_energy_ = 0;
};

/// Per-state summary at one b.
struct EnsembleSummary {
  unsigned n = 0;
  std::vector<double> c_nor;
  std::vector<double> energies;
  double z = 0;
  double p0b = 0;
  std::vector<double> distribution;
};

inline EnsembleSummary summarize(const CostFunction& cost, double b) {
  const Ensemble ens(cost);
  const auto pf = ens.partition_function(b);
  return EnsembleSummary{cost.n(),
                         {ens.normalized_costs().begin(), ens.normalized_costs().end()},
                         {ens.energies().begin(), ens.energies().end()},
                         pf.z,
                         pf.p0b,
                         ens.distribution(b)};
}

inline std::vector<double> energies(const CostFunction& cost) {
  const Ensemble ens(cost);
  return {ens.energies().begin(), ens.energies().end()};
}

inline PartitionFunction partition_function(const CostFunction& cost, double b) {
  return Ensemble(cost).partition_function(b);
}

inline std::vector<double> boltzmann_distribution(const CostFunction& cost, double b) {
  return Ensemble(cost).distribution(b);
}

inline double free_energy(const CostFunction& cost, double b) { return Ensemble(cost).free_energy(b); }

inline ThermoPoint thermo_point(const CostFunction& cost, double t) {
  return Ensemble(cost).thermo_point(t);
}

inline double consistency_p0b(const CostFunction& cost, double b) {
  return Ensemble(cost).consistency_p0b(b);
}

inline std::vector<ThermoPoint> sweep(const CostFunction& cost, std::span<const double> b_values) {
  return Ensemble(cost).sweep(b_values);
}

}  // namespace qanneal
