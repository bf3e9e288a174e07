#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qanneal/baseline.hpp"
#include "qanneal/ensemble.hpp"

using namespace qanneal;
using std::numbers::pi;

namespace {

/// Brute-force energies, straight from the definition.
std::vector<double> oracle_energies(const CostFunction& cost) {
  std::vector<double> e(cost.state_count());
  for (Bits x = 0; x < e.size(); ++x) e[x] = -2.0 * std::log(std::cos(oracle::theta(cost, x)));
  return e;
}

GraphPartitionInstance family(unsigned v) { return random_graph(v, 0.5, 1, 1.0, 0.25); }

}  // namespace

TEST(Ensemble, EffectiveEnergyExamples) {
  EXPECT_EQ(effective_energy(0.0), 0.0);
  EXPECT_NEAR(effective_energy(0.5), std::log(2.0), 1e-12);
  const double e = effective_energy(0.01);
  EXPECT_NEAR(e, 2.4674e-4, 1e-4 * e);  // the quoted value carries five digits
  EXPECT_LT(std::abs(e - pi * pi / 4 * 1e-4) / e, 1e-3);
}

TEST(Ensemble, AsymptoticBranches) {
  EXPECT_NEAR(asymptotic_energy(0.01, EnergyBranch::low), 2.4674e-4, 1e-8);
  double prev = 0.0;
  for (double gap : {1e-1, 1e-2, 1e-4, 1e-8, 1e-12}) {
    const double h = asymptotic_energy(1.0 - gap, EnergyBranch::high);
    EXPECT_GT(h, prev);
    prev = h;
  }
  for (double c = 1e-4; c < 0.05; c *= 1.3) {
    const double exact = effective_energy(c);
    EXPECT_LT(std::abs(asymptotic_energy(c, EnergyBranch::low) - exact) / exact, 0.01) << c;
  }
  for (double gap = 1e-6; gap < 0.01; gap *= 1.3) {
    const double exact = effective_energy(1.0 - gap);
    EXPECT_LT(std::abs(asymptotic_energy(1.0 - gap, EnergyBranch::high) - exact) / exact, 0.01) << gap;
  }
  EXPECT_THROW(asymptotic_energy(0.0, EnergyBranch::low), InputError);
  EXPECT_THROW(asymptotic_energy(1.0, EnergyBranch::high), InputError);
}

TEST(Ensemble, EnergiesMatchDefinition) {
  const auto cost = random_local_cost(7, 2, 0.5, 3);
  const auto e = energies(cost);
  const auto ref = oracle_energies(cost);
  for (std::size_t k = 0; k < e.size(); ++k) {
    EXPECT_NEAR(e[k], ref[k], 1e-12);
    EXPECT_GE(e[k], 0.0);
  }
}

TEST(Ensemble, EnumerationCap) {
  const auto cost = random_local_cost(10, 2, 0.2, 3);
  EXPECT_THROW(Ensemble(cost, 8), CapacityError);
  EXPECT_THROW(brute_force_min(cost, 8), CapacityError);
}

TEST(Ensemble, PartitionFunctionExamples) {
  const auto cost = random_local_cost(5, 2, 0.5, 9);
  auto pf = partition_function(cost, 0.0);
  EXPECT_DOUBLE_EQ(pf.z, 32.0);
  EXPECT_DOUBLE_EQ(pf.p0b, 1.0);

  pf = partition_function(oracle::two_state_example(), 1.0);
  EXPECT_NEAR(pf.p0b, 0.5, 1e-15);
  EXPECT_NEAR(pf.z, 1.0, 1e-15);

  const auto e = oracle_energies(cost);
  for (double b : {0.3, 1.0, 2.5, 7.0}) {
    pf = partition_function(cost, b);
    double z = 0.0;
    for (double ek : e) z += std::exp(-b * ek);
    EXPECT_NEAR(pf.z, z, 1e-12 * z);
    EXPECT_NEAR(pf.z, 32.0 * oracle::p0b(cost, b), 1e-12 * z);
    EXPECT_NEAR(std::exp(pf.log_p0b), pf.p0b, 1e-15);
  }
}

TEST(Ensemble, LogP0bSurvivesUnderflow) {
  const auto cost = CostFunction(2, 0.99, {}, 0.0, 1.0);
  const Ensemble ens(cost);
  const double b = 500.0;
  EXPECT_EQ(ens.partition_function(b).p0b, 0.0);
  EXPECT_NEAR(ens.log_p0b(b), 2.0 * b * std::log(std::cos(0.99 * pi / 2)), 1e-9);
  EXPECT_TRUE(std::isfinite(ens.free_energy(b)));
}

TEST(Ensemble, BoltzmannDistributionExamples) {
  const auto cost = random_local_cost(4, 2, 0.5, 9);
  for (double p : boltzmann_distribution(cost, 0.0)) EXPECT_NEAR(p, 1.0 / 16.0, 1e-15);
  const auto two = boltzmann_distribution(oracle::two_state_example(), 1.0);
  EXPECT_NEAR(two[0], 0.853553, 1e-6);
  EXPECT_NEAR(two[1], 0.146447, 1e-6);
  EXPECT_NEAR(two[0], std::pow(std::cos(pi / 8), 2), 1e-12);
}

TEST(Ensemble, BoltzmannEquivalenceOfBothRoutes) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const unsigned n = 1 + seed;
    const auto cost = random_local_cost(n, std::min(2U, n), 0.5, 500 + seed);
    const Ensemble ens(cost);
    for (double b : {0.5, 1.0, 4.0, 16.0}) {
      const auto exp_route = ens.distribution(b);
      const auto cos_route = ens.distribution_cosine(b);
      const auto ref = oracle::postselected(cost, b);
      double total = 0.0;
      for (std::size_t x = 0; x < ref.size(); ++x) {
        ASSERT_NEAR(exp_route[x], cos_route[x], 1e-12);
        ASSERT_NEAR(exp_route[x], ref[x], 1e-12);
        total += exp_route[x];
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Ensemble, FreeEnergyExamples) {
  const double c = 0.3;
  const auto constant = CostFunction(3, c, {}, 0.0, 1.0);
  for (double b : {0.1, 1.0, 10.0}) {
    EXPECT_NEAR(free_energy(constant, b), -2.0 * std::log(std::cos(pi * c / 2)), 1e-12);
  }
  EXPECT_NEAR(free_energy(oracle::two_state_example(), 1.0), std::log(2.0), 1e-12);
  EXPECT_THROW(free_energy(constant, 0.0), InputError);
  EXPECT_THROW(free_energy(constant, -1.0), InputError);
}

TEST(Ensemble, FreeEnergyApproachesGroundLevelAsLogDegeneracyOverB) {
  // F = E_min - (1/b) log(g/N + sum_{E > E_min} e^{-b(E - E_min)}/N); on a gapped
  // instance the tail vanishes and F - E_min = log(N/g)/b.
  const auto cost = random_local_cost(8, 2, 0.5, 123);
  const auto e = oracle_energies(cost);
  const double e_min = *std::min_element(e.begin(), e.end());
  std::size_t g = 0;
  double gap = INFINITY;
  for (double ek : e) {
    if (ek - e_min < 1e-12) {
      ++g;
    } else {
      gap = std::min(gap, ek - e_min);
    }
  }
  const double b = 1e4;
  ASSERT_GT(b * gap, 50.0) << "instance is not gapped enough for this check";
  const double f = free_energy(cost, b);
  EXPECT_NEAR(f - e_min, std::log(256.0 / g) / b, 1e-10);
  EXPECT_LT(f - e_min, 1e-3);
}

TEST(Ensemble, ThermoPointOfConstantCostIsDegenerate) {
  const auto cost = CostFunction(3, 0.3, {}, 0.0, 1.0);
  const auto pt = thermo_point(cost, 0.5);
  EXPECT_NEAR(pt.u, pt.f, 1e-12);
  EXPECT_NEAR(pt.s, 0.0, 1e-12);
  EXPECT_FALSE(pt.accuracy.has_value());
  EXPECT_TRUE(Ensemble(cost).degenerate());
  EXPECT_THROW(thermo_point(cost, 0.0), InputError);
}

TEST(Ensemble, ThermoPointIdentities) {
  const auto cost = random_local_cost(8, 2, 0.5, 77);
  const Ensemble ens(cost);
  const auto truth = brute_force_min(cost);
  for (double b : {0.05, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 100.0}) {
    const auto pt = ens.thermo_point(1.0 / b);
    EXPECT_LT(pt.identity_residual(), 1e-9);
    EXPECT_TRUE(pt.entropy_consistent()) << "b=" << b << " gap=" << pt.entropy_relative_gap();
    EXPECT_LE(pt.s, 1e-12);
    EXPECT_GE(pt.s, -std::log(256.0) - 1e-12);
    EXPECT_GE(pt.s_gibbs, -1e-12);
    EXPECT_LE(pt.s_gibbs, 8 * std::log(2.0) + 1e-12);
    ASSERT_TRUE(pt.accuracy.has_value());
    EXPECT_GE(*pt.accuracy, -1e-12);
    EXPECT_LE(*pt.accuracy, 1.0 + 1e-12);
    EXPECT_GE(pt.c_eff, truth.min_value - 1e-12);
    EXPECT_LE(pt.c_eff, pt.c_inf + 1e-12);
    EXPECT_EQ(pt.c_opt, truth.min_value);
    EXPECT_NEAR(pt.expected_repetitions * pt.p0b, 1.0, 1e-12);
  }
}

TEST(Ensemble, InfiniteTemperatureLimit) {
  const auto cost = random_local_cost(6, 2, 0.5, 5);
  const Ensemble ens(cost);
  const auto e = oracle_energies(cost);
  double mean = 0.0;
  for (double ek : e) mean += ek / e.size();
  EXPECT_NEAR(ens.mean_energy(), mean, 1e-12);
  EXPECT_NEAR(ens.free_energy(1e-10), mean, 1e-9);
  EXPECT_NEAR(ens.c_inf(), ens.denormalize(Ensemble::effective_cost_nor(mean)), 1e-12);

  const auto pt = ens.thermo_point(1e8);
  EXPECT_NEAR(pt.s_gibbs, std::log(64.0), 1e-9);
  EXPECT_NEAR(pt.c_eff, pt.c_inf, 1e-7);
  EXPECT_NEAR(*pt.accuracy, 0.0, 1e-6);
}

TEST(Ensemble, ZeroTemperatureLimit) {
  const auto cost = random_local_cost(6, 2, 0.5, 5);
  const auto pt = thermo_point(cost, 1e-4);
  EXPECT_GT(*pt.accuracy, 0.99);
  // Residual is the log-degeneracy term; see FreeEnergyApproachesGroundLevel.
  EXPECT_LT(pt.c_eff - pt.c_opt, 1e-2 * (pt.c_inf - pt.c_opt));
}

TEST(Ensemble, ConsistencyResidual) {
  EXPECT_LT(consistency_p0b(oracle::two_state_example(), 1.0), 1e-12);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto cost = random_local_cost(8, 2, 0.5, seed);
    for (double b : {1.0, 2.0, 4.0, 8.0}) EXPECT_LT(consistency_p0b(cost, b), 1e-10);
  }
  EXPECT_LT(consistency_p0b(CostFunction(2, 0.3, {}, 0.0, 1.0), 3.0), 1e-15);
}

TEST(Ensemble, SweepMonotonicity) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto cost = random_local_cost(7, 3, 0.4, 40 + seed);
    const std::vector<double> bs{0.25, 0.5, 1, 2, 4, 8, 16, 32, 64};
    const auto pts = sweep(cost, bs);
    const auto diag = Ensemble::diagnose(pts);
    EXPECT_TRUE(diag.accuracy_nondecreasing);
    EXPECT_TRUE(diag.free_energy_nonincreasing);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      // C(t) nondecreasing in t, i.e. nonincreasing in b; Delta the reverse.
      EXPECT_LE(pts[i].c_eff, pts[i - 1].c_eff + 1e-12);
      EXPECT_GE(pts[i].delta, pts[i - 1].delta - 1e-12);
    }
  }
  EXPECT_THROW(sweep(random_local_cost(3, 1, 1, 1), std::vector<double>{1.0, 0.0}), InputError);
}

TEST(Ensemble, DiagnoseFlagsViolations) {
  ThermoPoint a, b;
  a.b = 1;
  a.f = 1.0;
  a.accuracy = 0.5;
  b.b = 2;
  b.f = 1.5;
  b.accuracy = 0.4;
  const std::vector<ThermoPoint> pts{a, b};
  const auto d = Ensemble::diagnose(pts);
  EXPECT_FALSE(d.free_energy_nonincreasing);
  EXPECT_FALSE(d.accuracy_nondecreasing);
}

TEST(Ensemble, ArgmaxOfDistributionIsArgmin) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto cost = random_local_cost(6, 2, 0.5, 300 + seed);
    const auto truth = brute_force_min(cost);
    for (double b : {0.1, 1.0, 3.0, 10.0}) {
      const auto p = boltzmann_distribution(cost, b);
      const auto top = static_cast<Bits>(std::max_element(p.begin(), p.end()) - p.begin());
      EXPECT_EQ(cost.evaluate(top), truth.min_value);
    }
  }
}

TEST(Ensemble, SummaryInvariants) {
  const auto cost = random_local_cost(5, 2, 0.5, 6);
  const auto s = summarize(cost, 2.0);
  EXPECT_NEAR(s.z, 32.0 * s.p0b, 1e-12);
  double total = 0.0;
  for (double p : s.distribution) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (double e : s.energies) EXPECT_TRUE(std::isfinite(e) && e >= 0.0);
  for (double c : s.c_nor) EXPECT_TRUE(c > 0.0 && c < 1.0);
}

// Graph family used for size-independence checks: p = 0.5, lambda = 0.25, J = 1.

TEST(Ensemble, AccuracyAtSmallBIsRoughlySizeIndependent) {
  for (double b : {1.0, 2.0}) {
    double lo = INFINITY, hi = -INFINITY;
    for (unsigned v : {8U, 12U, 16U}) {
      const auto pt = thermo_point(graph_partition_cost(family(v)), 1.0 / b);
      lo = std::min(lo, *pt.accuracy);
      hi = std::max(hi, *pt.accuracy);
    }
    EXPECT_LT(hi - lo, 0.1) << "b=" << b;
  }
}

TEST(Ensemble, ExpectedRepetitionsStayBoundedAcrossSizes) {
  // Jensen: P0 = <e^{-bE}> >= e^{-b<E>}, and <E> stays bounded when C_nor stays away
  // from 1, so 1/P0 has a size-independent ceiling. The sequence also settles: its
  // increments shrink as v grows.
  for (double b : {1.0, 2.0}) {
    std::vector<double> reps;
    double ceiling = 0.0;
    for (unsigned v = 4; v <= 16; v += 2) {
      const Ensemble ens(graph_partition_cost(family(v)));
      const auto pt = ens.thermo_point(1.0 / b);
      EXPECT_LE(pt.expected_repetitions, std::exp(b * ens.mean_energy()) * (1 + 1e-12));
      ceiling = std::max(ceiling, std::exp(b * ens.mean_energy()));
      reps.push_back(pt.expected_repetitions);
    }
    for (double r : reps) EXPECT_LE(r, ceiling);
    for (std::size_t i = 2; i < reps.size(); ++i) {
      EXPECT_LE(std::abs(reps[i] - reps[i - 1]), std::abs(reps[i - 1] - reps[i - 2]) + 0.01)
          << "b=" << b << " step " << i;
    }
  }
}
