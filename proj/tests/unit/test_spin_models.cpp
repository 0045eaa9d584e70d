#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "spinthermo/chimera.hpp"
#include "spinthermo/degenerate.hpp"
#include "spinthermo/enumerate.hpp"
#include "spinthermo/error.hpp"
#include "spinthermo/models.hpp"

using namespace spinthermo;

namespace {
Spectrum grounded(const Spectrum& s) { return s.shifted(-s.ground_energy()); }
}  // namespace

TEST(Hamiltonian, TopologyValidation) {
  EXPECT_THROW(Topology(3, {{0, 0}}), ValidationError);
  EXPECT_THROW(Topology(3, {{0, 1}, {1, 0}}), ValidationError);
  EXPECT_THROW(Topology(0, {}), SizeError);
  EXPECT_THROW(Topology(31, {}), SizeError);
  EXPECT_THROW(Topology(3, {{0, 5}}), ValidationError);
  Topology t(3, {{2, 0}});
  EXPECT_EQ(t.edges()[0].i, 0);
  EXPECT_EQ(t.edges()[0].j, 2);
}

TEST(Hamiltonian, CouplingOffTopologyThrows) {
  SpinHamiltonian hm(Topology::ring(4));
  EXPECT_THROW(hm.with_coupling(0, 2, 1.0), ValidationError);
  EXPECT_NO_THROW(hm.with_coupling(3, 0, 1.0));
}

TEST(Hamiltonian, EnergyMatchesDirectSum) {
  std::mt19937_64 rng(7);
  auto hm = oracle::random_hamiltonian(Topology::complete(6), rng);
  for (std::uint64_t c = 0; c < 64; ++c) EXPECT_NEAR(hm.energy(c), double(oracle::direct_energy(hm, c)), 1e-12);
}

TEST(Star, ExpansionOfTheHamiltonian) {
  auto hm = build_star({2, 0.3, -0.8});
  EXPECT_EQ(hm.fields(), (std::vector<double>{0.3, -0.8}));
  EXPECT_DOUBLE_EQ(hm.coupling(0, 1), -0.8);
  auto h7 = build_star({7, 5.070, 1.267});
  for (int i = 1; i < 7; ++i) {
    EXPECT_DOUBLE_EQ(h7.field(i), 1.267);
    EXPECT_DOUBLE_EQ(h7.coupling(0, i), 1.267);
  }
  EXPECT_EQ(h7.coupling_map().size(), 6u);
  EXPECT_THROW(build_star({1, 0, 0}), DomainError);
}

TEST(Star, ZeroParametersGiveZeroC) {
  EXPECT_EQ(star_heat_capacity({9, 0, 0}), 0.0);
  EXPECT_NEAR(star_log_z({9, 0, 0}), 9 * std::log(2.0), 1e-13);
}

TEST(Star, TwoSpinPartitionFunction) {
  double a = 0.4, b = -0.7;
  double z = std::exp(-a) * (std::exp(2 * b) + std::exp(-2 * b)) + 2 * std::exp(a);
  EXPECT_NEAR(star_log_z({2, a, b}), std::log(z), 1e-14);
}

TEST(Star, SpectrumShape) {
  auto s = star_spectrum({9, 8.0, 1.5});
  EXPECT_EQ(s.total_dim(), 512u);
  bool flat = false;
  for (auto& l : s.levels()) flat = flat || l.degeneracy == 256;
  EXPECT_TRUE(flat);
}

TEST(Star, TiedWindowFirstExcitedDegeneracy) {
  for (int n : {5, 8, 12}) {
    double b = 1.1;
    auto s = star_spectrum({n, b * (n - 3), b});
    ASSERT_GE(s.size(), 2u);
    EXPECT_EQ(s[0].degeneracy, 1u);
    EXPECT_EQ(s[1].degeneracy, (1ull << (n - 1)) + (n - 1));
  }
}

TEST(Star, DegeneracyOrderingWindow) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ub(0.1, 3.0), uf(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    int n = 4 + t % 10;
    double b = ub(rng);
    double a = b * (n - 3) + uf(rng) * 2 * b * 0.999;
    auto s = star_spectrum({n, a, b});
    EXPECT_EQ(s[0].degeneracy, 1u);
    EXPECT_GE(s[1].degeneracy, 1ull << (n - 1));
  }
}

TEST(Star, LogZAndCMatchOracleAndSpectrum) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int n = 2; n <= 16; ++n) {
    for (int t = 0; t < 5; ++t) {
      double a = u(rng), b = u(rng) / 2;
      auto ref = oracle::star(n, a, b);
      EXPECT_TRUE(oracle::rel_close(star_log_z({n, a, b}), ref.log_z, 1e-12));
      EXPECT_TRUE(oracle::rel_close(star_heat_capacity({n, a, b}), ref.c, 1e-10));
      EXPECT_TRUE(oracle::rel_close(thermal_stats(star_spectrum({n, a, b}), 1.0).heat_capacity, ref.c, 1e-10));
    }
  }
}

TEST(Star, LargeNIsFinite) {
  double c = star_heat_capacity({1000000, 2e5, 1000.0});
  EXPECT_TRUE(std::isfinite(c));
  EXPECT_TRUE(std::isfinite(star_log_z({1000000, 3.0, 1.0})));
}

TEST(Star, SandwichAtTableValues) {
  double c = star_heat_capacity({7, 5.070, 1.267});
  EXPECT_GE(c, c_opt(64));
  EXPECT_LE(c, c_opt(128));
}

TEST(StarBar, SameSpectrumAsStar) {
  for (int n : {5, 9}) {
    StarParams p{n, 8.96, -1.51};
    EXPECT_EQ(enumerate_spectrum(build_star_bar(p)), enumerate_spectrum(build_star(p)));
  }
}

TEST(StarChain, SingleUnitIsStar) {
  StarChainParams p{1, 5, 1.2, 0.7, -3.0};
  auto hm = build_star_chain(p);
  EXPECT_EQ(hm, build_star({6, 1.2, 0.7}));
  EXPECT_NEAR(star_chain_log_z(p), star_log_z({6, 1.2, 0.7}), 1e-13);
}

TEST(StarChain, TwoUnitsUseOneDoubledEdge) {
  auto hm = build_star_chain({2, 3, 1.0, 0.5, -0.9});
  EXPECT_EQ(hm.n_spins(), 8);
  EXPECT_DOUBLE_EQ(hm.coupling(0, 1), -1.8);
  EXPECT_EQ(hm.coupling_map().size(), 7u);
}

TEST(StarChain, RenderedTerms) {
  StarChainParams p{4, 2, 0.3, 0.6, -1.1};
  auto hm = build_star_chain(p);
  for (int al = 0; al < 4; ++al) {
    EXPECT_DOUBLE_EQ(hm.field(al), 0.3);
    EXPECT_DOUBLE_EQ(hm.coupling(al, (al + 1) % 4), -1.1);
    for (int i = 0; i < 2; ++i) {
      int leaf = 4 + al * 2 + i;
      EXPECT_DOUBLE_EQ(hm.field(leaf), 0.6);
      EXPECT_DOUBLE_EQ(hm.coupling(al, leaf), 0.6);
    }
  }
  auto open = build_star_chain({4, 2, 0.3, 0.6, -1.1, HubBoundary::open});
  EXPECT_DOUBLE_EQ(open.coupling(3, 0), 0.0);
}

TEST(StarChain, LogZMatchesTransferOracleAndEnumeration) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n : {2, 3, 4}) {
    for (int m : {1, 2, 3}) {
      for (int t = 0; t < 4; ++t) {
        StarChainParams p{n, m, u(rng), u(rng), u(rng)};
        long double ref = oracle::star_chain_periodic_log_z(n, m, p.a, p.b, p.j);
        EXPECT_TRUE(oracle::rel_close(star_chain_log_z(p), ref, 1e-12));
        auto bf = oracle::brute_force(build_star_chain(p));
        EXPECT_TRUE(oracle::rel_close(star_chain_log_z(p), bf.log_z, 1e-12));
        EXPECT_TRUE(oracle::rel_close(star_chain_heat_capacity(p), bf.c, 1e-9));
        p.boundary = HubBoundary::open;
        auto bo = oracle::brute_force(build_star_chain(p));
        EXPECT_TRUE(oracle::rel_close(star_chain_log_z(p), bo.log_z, 1e-12));
        EXPECT_TRUE(oracle::rel_close(star_chain_heat_capacity(p), bo.c, 1e-9));
      }
    }
  }
}

TEST(StarChain, ZeroParameters) {
  EXPECT_NEAR(star_chain_log_z({5, 3, 0, 0, 0}), 20 * std::log(2.0), 1e-12);
}

TEST(StarChain, TransferEigenvaluesMatchDisplayedForm) {
  StarChainParams p{3, 3, 0.8, 0.4, -0.6};
  // The displayed closed form agrees with the transfer matrix W once C = e^{-J}.
  double A = std::exp(p.a), B = std::cosh(2 * p.b), C = std::exp(-p.j);
  int m = p.leaves_per_unit;
  double pre = std::pow(2.0, m - 1) / (A * C);
  double root = std::sqrt(4 * A * A * std::pow(B, m) + std::pow(C, 4) * std::pow(A * A - std::pow(B, m), 2));
  double lp = pre * (C * C * (A * A + std::pow(B, m)) + root);
  double lm = pre * (C * C * (A * A + std::pow(B, m)) - root);
  auto [gp, gm] = star_chain_transfer_eigenvalues(p);
  EXPECT_NEAR(gp, lp, 1e-12 * lp);
  EXPECT_NEAR(gm, lm, 1e-12 * std::abs(lp));
}

TEST(StarChain, SpectrumAgainstEnumeration) {
  StarChainParams p{2, 2, 0.9, 0.35, -0.55};
  EXPECT_EQ(grounded(star_chain_spectrum(p)), enumerate_spectrum(build_star_chain(p)));
  StarChainParams q{3, 3, 1.3, 0.6, 0.45, HubBoundary::open};
  EXPECT_EQ(grounded(star_chain_spectrum(q)), enumerate_spectrum(build_star_chain(q)));
  EXPECT_EQ(star_chain_spectrum({4, 3, 1.0, 0.5, -1.0}).total_dim(), 1ull << 16);
  EXPECT_THROW(star_chain_spectrum({21, 1, 1, 1, 1}), SizeError);
}

TEST(StarChain, AllHubsDownLevel) {
  StarChainParams p{3, 2, 1.0, 0.5, -0.4};
  auto hm = build_star_chain(p);
  auto energies = oracle::all_energies(hm);
  double e0 = double(*std::min_element(energies.begin(), energies.end()));
  // All hubs down: -n a from the fields, n J from the closed ring, leaves free.
  double e_flat = -3 * 1.0 + 3 * -0.4;
  bool found = false;
  for (auto& l : grounded(star_chain_spectrum(p)).levels())
    found = found || (std::abs(l.energy - (e_flat - e0)) < 1e-9 && l.degeneracy >= (1ull << 6));
  EXPECT_TRUE(found);
}

TEST(StarChain, StrongHubCouplingReducesToStar) {
  // J -> -inf: hubs locked together; low levels match a Star on nm+1 spins
  // with hub field n a.
  int n = 3, m = 2;
  double a = 1.4, b = 0.6, J = -25.0;
  StarChainParams p{n, m, a, b, J, HubBoundary::open};
  auto chain = grounded(star_chain_spectrum(p));
  auto star = grounded(star_spectrum({n * m + 1, n * a, b}));
  double cut = std::abs(J);
  std::vector<Level> low;
  for (auto& l : chain.levels())
    if (l.energy < cut) low.push_back(l);
  std::vector<Level> low_star;
  for (auto& l : star.levels())
    if (l.energy < cut) low_star.push_back(l);
  ASSERT_EQ(low.size(), low_star.size());
  for (std::size_t i = 0; i < low.size(); ++i) {
    EXPECT_NEAR(low[i].energy, low_star[i].energy, 1e-9);
    EXPECT_EQ(low[i].degeneracy, low_star[i].degeneracy);
  }
}

TEST(Ising, IndependentSpinsWhenUncoupled) {
  for (double h : {0.3, 1.2, 2.0}) {
    double expect = 10 * h * h / std::pow(std::cosh(h), 2);
    EXPECT_NEAR(ising_1d_stats(h, 0.0, 10).heat_capacity, expect, 1e-12 * expect);
  }
}

TEST(Ising, MatchesEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n : {3, 4, 7, 10}) {
    for (int t = 0; t < 5; ++t) {
      double h = u(rng), j = u(rng);
      auto bf = oracle::brute_force(build_ising_1d(h, j, n));
      auto got = ising_1d_stats(h, j, n);
      EXPECT_TRUE(oracle::rel_close(got.log_partition, bf.log_z, 1e-12));
      EXPECT_TRUE(oracle::rel_close(got.heat_capacity, bf.c, 1e-9));
    }
  }
}

TEST(Ising, SignConvention) {
  auto hm = build_ising_1d(0.5, 0.25, 3);
  EXPECT_DOUBLE_EQ(hm.field(0), -0.5);
  EXPECT_DOUBLE_EQ(hm.coupling(0, 1), -0.25);
}

TEST(AllToAll, SpectrumMatchesEnumeration) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 5; ++t) {
    double h = u(rng), j = u(rng);
    EXPECT_EQ(grounded(all_to_all_spectrum(h, j, 8)), enumerate_spectrum(build_all_to_all(h, j, 8)));
    auto bf = oracle::brute_force(build_all_to_all(h, j, 8));
    EXPECT_TRUE(oracle::rel_close(all_to_all_stats(h, j, 8).heat_capacity, bf.c, 1e-10));
  }
}

TEST(AllToAll, EqualFieldAndCouplingIsParabolic) {
  for (int n : {5, 8, 11}) {
    double J = 0.7;
    auto s = grounded(all_to_all_spectrum(J, J, n));
    EXPECT_EQ(s[0].degeneracy, 1u);
    EXPECT_EQ(s[1].degeneracy, std::uint64_t(n + 1));
    // Raw energies relative to the all-up state: 2 J (k+1)(N-k) with k up-spins counted from the top.
    std::set<long long> expect;
    for (int k = 0; k < n; ++k) expect.insert(std::llround(2 * J * (k + 1) * (n - k) * 1e6));
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_TRUE(expect.count(std::llround(s[i].energy * 1e6))) << i;
  }
}

TEST(AllToAll, LargeNFinite) {
  EXPECT_TRUE(std::isfinite(all_to_all_stats(0.1, 0.01, 500).heat_capacity));
}

TEST(KSat, ReferenceCurve) {
  EXPECT_DOUBLE_EQ(ksat_reference_curve(8), c_opt(16));
  EXPECT_THROW(ksat_reference_curve(7), DomainError);
  double n = 200;
  double r = ksat_reference_curve(200) / (std::log(2.0) * std::log(2.0) * n * n / 16);
  EXPECT_NEAR(r, 1.0, 0.05);
}

TEST(Chimera, EdgeCounts) {
  EXPECT_EQ(chimera_topology(1).size(), 16u);
  auto t3 = chimera_topology(3);
  EXPECT_EQ(t3.n_spins(), 24);
  EXPECT_EQ(t3.size(), 56u);
  EXPECT_TRUE(t3.contains(chimera_site(0, 4), chimera_site(1, 0)));
  EXPECT_TRUE(t3.contains(chimera_site(1, 7), chimera_site(2, 3)));
  EXPECT_FALSE(t3.contains(chimera_site(0, 0), chimera_site(0, 1)));
}

TEST(Chimera, StarChainEmbeds) {
  StarChainParams p{3, 3, 1.0, 0.5, -1.0, HubBoundary::open};
  auto emb = embed_star_chain(p, 3);
  auto topo = chimera_topology(3);
  for (const auto& [key, v] : emb.coupling_map()) EXPECT_TRUE(topo.contains(key.first, key.second));
  // Same physics as the abstract chain.
  EXPECT_NEAR(enumerate_stats(emb, 1.0).heat_capacity, star_chain_heat_capacity(p), 1e-9);
}
