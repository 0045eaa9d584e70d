#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spinthermo/degenerate.hpp"
#include "spinthermo/error.hpp"
#include "spinthermo/spectrum.hpp"

using namespace spinthermo;

namespace {

ThermalStats stats_raw(const std::vector<Level>& lv, double beta = 1.0) {
  return thermal_stats(std::span<const Level>(lv), beta);
}

Spectrum random_spectrum(std::mt19937_64& rng, int levels) {
  std::uniform_real_distribution<double> e(-5, 5);
  std::uniform_int_distribution<int> d(1, 50);
  std::vector<Level> raw;
  for (int i = 0; i < levels; ++i) raw.push_back({e(rng), std::uint64_t(d(rng))});
  return Spectrum::merged(raw);
}

}  // namespace

TEST(Spectrum, RejectsUnsortedAndZeroDegeneracy) {
  EXPECT_THROW(Spectrum({{1.0, 1}, {0.0, 1}}), ValidationError);
  EXPECT_THROW(Spectrum({{0.0, 0}}), ValidationError);
  EXPECT_THROW(Spectrum({{0.0, 1}, {1e-12, 1}}), ValidationError);
}

TEST(Spectrum, MergeCombinesNearbyLevels) {
  auto s = Spectrum::merged({{1.0, 2}, {0.0, 1}, {1.0 + 1e-11, 3}}, true);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].degeneracy, 5u);
  EXPECT_EQ(s.total_dim(), 6u);
  EXPECT_DOUBLE_EQ(s.ground_energy(), 0.0);
}

TEST(Populations, SymmetricTwoLevel) {
  std::vector<Level> lv{{0, 1}, {0, 1}};
  auto p = gibbs_populations(std::span<const Level>(lv), 1.0);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(Populations, BalancedDegenerateGap) {
  for (std::uint64_t D : {3ull, 17ull, 1ull << 20}) {
    auto p = gibbs_populations(Spectrum({{0, 1}, {std::log(double(D - 1)), D - 1}}), 1.0);
    EXPECT_NEAR(p[0], 0.5, 1e-14);
  }
}

TEST(Populations, ThreeFoldExcited) {
  auto p = gibbs_populations(Spectrum({{0, 1}, {2, 3}}), 1.0);
  EXPECT_NEAR(p[0], 1.0 / (1.0 + 3.0 * std::exp(-2.0)), 1e-15);
}

TEST(Populations, NoOverflowAtLargeBetaE) {
  auto p = gibbs_populations(Spectrum({{-700, 1}, {0, 1}, {700, 1}}), 1.0);
  double sum = p[0] + p[1] + p[2];
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(p[0], 1.0, 1e-12);
}

TEST(Populations, SumToOne) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    auto s = random_spectrum(rng, 20);
    auto p = gibbs_populations(s, 0.7);
    double sum = 0;
    for (double x : p) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(ThermalStats, MatchesLongDoubleOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    auto s = random_spectrum(rng, 12);
    std::vector<std::pair<long double, long double>> lv;
    for (auto& l : s.levels()) lv.emplace_back(l.energy, l.degeneracy);
    for (double beta : {0.3, 1.0, 2.5}) {
      auto got = thermal_stats(s, beta);
      auto ref = oracle::stats_of(lv, beta);
      EXPECT_TRUE(oracle::rel_close(got.log_partition, ref.log_z, 1e-13));
      EXPECT_TRUE(oracle::rel_close(got.energy_variance, ref.var, 1e-11));
      EXPECT_NEAR(got.heat_capacity, beta * beta * got.energy_variance, 1e-15);
    }
  }
}

TEST(ThermalStats, FlatSpectrumHasZeroHeatCapacity) {
  EXPECT_EQ(stats_raw({{3, 1}, {3, 7}, {3, 2}}).heat_capacity, 0.0);
}

TEST(ThermalStats, TwoLevelClosedForm) {
  for (double E : {0.1, 1.0, 2.4, 7.0}) {
    double expect = E * E * std::exp(-E) / std::pow(1 + std::exp(-E), 2);
    EXPECT_NEAR(stats_raw({{0, 1}, {E, 1}}).heat_capacity, expect, 1e-15);
  }
}

TEST(ThermalStats, ShiftInvariance) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    auto s = random_spectrum(rng, 15);
    double c0 = thermal_stats(s, 1.0).heat_capacity;
    for (double c : {-100.0, 0.37, 250.0}) {
      EXPECT_TRUE(oracle::rel_close(thermal_stats(s.shifted(c), 1.0).heat_capacity, c0, 1e-12));
    }
  }
}

TEST(ThermalStats, ScaleInvariance) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    auto s = random_spectrum(rng, 15);
    double c0 = thermal_stats(s, 1.0).heat_capacity;
    for (double lambda : {0.1, 2.0, 10.0}) {
      EXPECT_TRUE(oracle::rel_close(thermal_stats(s.scaled(lambda), 1.0 / lambda).heat_capacity, c0, 1e-12));
    }
  }
}

TEST(ThermalStats, ThirdMomentMatchesBetaDerivative) {
  // d Var / d beta = -mu_3
  std::vector<Level> lv{{0, 1}, {1.3, 4}, {2.9, 2}, {5.0, 9}};
  double h = 1e-5;
  double dv = (stats_raw(lv, 1 + h).energy_variance - stats_raw(lv, 1 - h).energy_variance) / (2 * h);
  EXPECT_NEAR(-energy_third_central_moment(std::span<const Level>(lv), 1.0), dv, 1e-8);
}

TEST(OptimalGap, MatchesBisectionOracle) {
  for (std::uint64_t D : {3ull, 4ull, 5ull, 64ull, 1000ull, 1ull << 20, 1ull << 40}) {
    double x = optimal_gap(D);
    long double ref = oracle::optimal_gap(static_cast<long double>(D - 1));
    EXPECT_NEAR(x, double(ref), 1e-12 * double(ref)) << D;
  }
}

TEST(OptimalGap, DefiningEquationResidual) {
  for (std::uint64_t D = 3; D <= (1u << 20); D = D < 64 ? D + 1 : D * 3) {
    long double x = optimal_gap(D);
    long double lhs = std::exp(x) * (x - 2), rhs = (long double)(D - 1) * (x + 2);
    EXPECT_LT(std::fabs(lhs - rhs) / rhs, 1e-12L) << D;
  }
}

TEST(OptimalGap, AsymptoticallyLnD) {
  double lnD = 40 * std::log(2.0);
  double ratio = optimal_gap(1ull << 40) / lnD;
  EXPECT_GE(ratio, 0.95);
  EXPECT_LE(ratio, 1.05);
}

TEST(OptimalGap, RejectsSmallD) {
  EXPECT_THROW(optimal_gap(2), DomainError);
  EXPECT_THROW(c_opt(1), DomainError);
}

TEST(COpt, EqualsClosedFormAtOptimalGap) {
  for (std::uint64_t D : {3ull, 10ull, 256ull, 1ull << 30}) {
    long double x = oracle::optimal_gap(D - 1);
    long double ref = x * x * std::exp(x) * (D - 1) / std::pow((D - 1) + std::exp(x), 2);
    EXPECT_NEAR(c_opt(D), double(ref), 1e-11 * double(ref));
  }
}

TEST(COpt, BoundsTheGapScan) {
  for (std::uint64_t D : {3ull, 7ull, 100ull, 5000ull}) {
    double best = 0;
    for (int i = 1; i < 20000; ++i) {
      double E = i * 1e-3;
      best = std::max(best, stats_raw({{0, 1}, {E, D - 1}}).heat_capacity);
    }
    EXPECT_GE(c_opt(D), best - 1e-9);
  }
}

TEST(COpt, MonotoneInD) {
  double prev = 0;
  for (std::uint64_t D = 3; D <= (1u << 16); ++D) {
    double c = c_opt(D);
    ASSERT_GE(c, prev - 1e-15) << D;
    prev = c;
  }
}

TEST(COpt, ConvergesToQuadraticLawFromAbove) {
  // The normalized ratio approaches 1 from above; see the project notes.
  double prev = 1e9;
  for (int n = 8; n <= 60; n += 4) {
    double r = c_opt_spins(n) / (n * n * std::log(2.0) * std::log(2.0) / 4);
    EXPECT_GT(r, 1.0);
    EXPECT_LT(r, prev);
    prev = r;
  }
  EXPECT_LT(prev, 1.01);
}

TEST(COpt, ConsecutiveRatioAtTwenty) {
  EXPECT_LT(std::abs(c_opt_spins(20) / c_opt_spins(19) - 1.0), 0.15);
}

TEST(COpt, SpinsMatchesIntegerForm) {
  for (int n = 2; n <= 40; ++n) EXPECT_NEAR(c_opt_spins(n), c_opt(1ull << n), 1e-12 * c_opt(1ull << n));
}

TEST(SingleSpin, MaximumIsPointFourFour) {
  EXPECT_NEAR(single_spin_c_max(), 0.4392, 5e-4);
  auto g = max_c_over_gap([](double E) { return std::vector<Level>{{0, 1}, {E, 1}}; });
  EXPECT_NEAR(g.heat_capacity, single_spin_c_max(), 1e-12);
}

TEST(MaxOverGap, DegenerateTemplateRecoversOptimalGap) {
  for (std::uint64_t D : {5ull, 300ull, 1ull << 16}) {
    auto g = max_c_over_gap([D](double E) { return std::vector<Level>{{0, 1}, {E, D - 1}}; });
    EXPECT_NEAR(g.gap, optimal_gap(D), 1e-6);
  }
}

TEST(ErrorBound, Basics) {
  EXPECT_DOUBLE_EQ(estimation_error_bound(1.0, 1), 1.0);
  EXPECT_NEAR(estimation_error_bound(0.44, 100), 1.0 / 44.0, 1e-15);
  EXPECT_DOUBLE_EQ(estimation_error_bound(2.0, 20), 0.5 * estimation_error_bound(2.0, 10));
  EXPECT_THROW(estimation_error_bound(0.0, 1), DomainError);
  EXPECT_THROW(estimation_error_bound(1.0, 0), DomainError);
}

TEST(Lemma, AddingLevelsAboveTheGapNeverLowersMaxC) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> deg(1, 200), extra(1, 6);
  std::uniform_real_distribution<double> off(0.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    std::uint64_t k1 = deg(rng);
    std::vector<std::pair<double, std::uint64_t>> add;
    for (int i = extra(rng); i > 0; --i) add.push_back({off(rng), std::uint64_t(deg(rng))});
    auto h1 = max_c_over_gap([k1](double E) { return std::vector<Level>{{0, 1}, {E, k1}}; });
    auto h2 = max_c_over_gap([&](double E) {
      std::vector<Level> lv{{0, 1}, {E, k1}};
      for (auto [o, d] : add) lv.push_back({E + o, d});
      return lv;
    });
    EXPECT_GE(h2.heat_capacity, h1.heat_capacity - 1e-9) << t;
  }
}
