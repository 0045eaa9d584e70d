#pragma once

// Independent reference computations used only by tests. Everything here is
// deliberately naive: direct sums in long double, no Gray codes, no shared
// kernels with the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "spinthermo/hamiltonian.hpp"

namespace oracle {

using ld = long double;

struct Stats {
  ld log_z = 0;
  ld mean = 0;
  ld var = 0;
  ld c = 0;
};

// Weighted energies (E, w) with Z = sum w e^{-beta E}.
inline Stats stats_of(const std::vector<std::pair<ld, ld>>& levels, ld beta) {
  ld emin = levels.front().first;
  for (auto& [e, w] : levels) emin = std::min(emin, e);
  ld z = 0, m1 = 0;
  for (auto& [e, w] : levels) {
    ld p = w * std::exp(-beta * (e - emin));
    z += p;
    m1 += p * (e - emin);
  }
  Stats s;
  s.log_z = std::log(z) - beta * emin;
  ld mean_rel = m1 / z;
  s.mean = mean_rel + emin;
  // Second pass about the mean: no m2 - m1^2 cancellation when one level dominates.
  ld m2 = 0;
  for (auto& [e, w] : levels) {
    ld dev = e - emin - mean_rel;
    m2 += w * std::exp(-beta * (e - emin)) * dev * dev;
  }
  s.var = m2 / z;
  s.c = beta * beta * s.var;
  return s;
}

inline ld direct_energy(const spinthermo::SpinHamiltonian& hm, std::uint64_t cfg) {
  ld e = 0;
  const int n = hm.n_spins();
  auto s = [&](int i) -> ld { return ((cfg >> i) & 1u) ? 1 : -1; };
  for (int i = 0; i < n; ++i) e += hm.fields()[i] * s(i);
  for (const auto& [key, j] : hm.coupling_map(false)) e += j * s(key.first) * s(key.second);
  return e;
}

inline std::vector<ld> all_energies(const spinthermo::SpinHamiltonian& hm) {
  std::vector<ld> out(std::uint64_t{1} << hm.n_spins());
  for (std::uint64_t c = 0; c < out.size(); ++c) out[c] = direct_energy(hm, c);
  return out;
}

inline Stats brute_force(const spinthermo::SpinHamiltonian& hm, ld beta = 1) {
  std::vector<std::pair<ld, ld>> lv;
  for (ld e : all_energies(hm)) lv.emplace_back(e, 1);
  return stats_of(lv, beta);
}

inline ld binom(int n, int k) {
  ld r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Star levels written out from the Hamiltonian: hub down gives -a for every
// leaf pattern; hub up gives a + 2b(#up - #down).
inline Stats star(int n, ld a, ld b, ld beta = 1) {
  std::vector<std::pair<ld, ld>> lv;
  lv.emplace_back(-a, std::pow(2.0L, n - 1));
  for (int k = 0; k <= n - 1; ++k) lv.emplace_back(a + 2 * b * (2 * k - (n - 1)), binom(n - 1, k));
  return stats_of(lv, beta);
}

// ln Z of the periodic star-chain from the 2x2 symmetric transfer matrix,
// eigenvalues by the quadratic formula.
inline ld star_chain_periodic_log_z(int n, int m, ld a, ld b, ld j, ld beta = 1) {
  ld vu = std::exp(-beta * a) * std::pow(2 * std::cosh(2 * beta * b), m);
  ld vd = std::exp(beta * a) * std::pow(2.0L, m);
  // T = D^{1/2} B D^{1/2}, B_ss' = e^{-beta J s s'}
  ld tuu = vu * std::exp(-beta * j), tdd = vd * std::exp(-beta * j);
  ld tud = std::sqrt(vu * vd) * std::exp(beta * j);
  ld tr = tuu + tdd, det = tuu * tdd - tud * tud;
  ld disc = std::sqrt(tr * tr / 4 - det);
  ld lp = tr / 2 + disc, lm = tr / 2 - disc;
  return std::log(std::pow(lp, n) + std::pow(lm, n));
}

// Long-double bisection on d ln C/dx = 2/x - (1-q)/(1+q), q = (D-1) e^{-x}.
inline ld optimal_gap(ld dm1) {
  auto g = [&](ld x) {
    ld q = dm1 * std::exp(-x);
    return 2 / x - (1 - q) / (1 + q);
  };
  ld lo = 2 + 1e-15L, hi = 2 + std::log(dm1) + 40;
  for (int i = 0; i < 300; ++i) {
    ld mid = 0.5L * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

inline ld two_level_c(ld dm1, ld x) {
  ld q = dm1 * std::exp(-x);
  return x * x * q / ((1 + q) * (1 + q));
}

template <class F>
double central_difference(F f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

inline spinthermo::SpinHamiltonian random_hamiltonian(const spinthermo::Topology& t, std::mt19937_64& rng,
                                                      double lo = -1.5, double hi = 1.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> h(t.n_spins()), j(t.size());
  for (auto& x : h) x = u(rng);
  for (auto& x : j) x = u(rng);
  return spinthermo::SpinHamiltonian(t, h, j);
}

inline bool rel_close(long double a, long double b, long double tol) {
  return std::fabs(a - b) <= tol * std::max<long double>({std::fabs(a), std::fabs(b), 1e-300L});
}

}  // namespace oracle
