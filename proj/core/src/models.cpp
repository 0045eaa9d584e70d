#include "spinthermo/models.hpp"

#include <cmath>
#include <sstream>

#include "spinthermo/degenerate.hpp"
#include "spinthermo/dual.hpp"
#include "spinthermo/error.hpp"

namespace spinthermo {
namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::uint64_t>(r);
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("inverse temperature must be positive");
}

void check_star(const StarParams& p) {
  if (p.n_spins < 2) throw DomainError("star model needs N >= 2");
}

void check_chain(const StarChainParams& p) {
  if (p.n_units < 1 || p.leaves_per_unit < 1) throw DomainError("star-chain needs n >= 1 and m >= 1");
}

template <class LogZ>
ThermalStats stats_from_log_z(LogZ&& log_z, double beta) {
  using D2 = ad::Dual<ad::Dual<double>>;
  D2 X{ad::Dual<double>{beta, 1.0}, ad::Dual<double>{1.0, 0.0}};
  D2 r = log_z(X);
  ThermalStats st;
  st.beta = beta;
  st.log_partition = r.v.v;
  st.mean_energy = -r.v.d;
  st.energy_variance = r.d.d;
  st.heat_capacity = beta * beta * st.energy_variance;
  return st;
}

}  // namespace

SpinHamiltonian build_star(const StarParams& p) {
  check_star(p);
  std::vector<Edge> edges;
  for (int i = 1; i < p.n_spins; ++i) edges.push_back({0, i});
  std::vector<double> h(p.n_spins, p.b);
  h[0] = p.a;
  std::vector<double> J(edges.size(), p.b);
  return SpinHamiltonian(Topology(p.n_spins, std::move(edges)), std::move(h), std::move(J));
}

SpinHamiltonian build_star_bar(const StarParams& p) {
  if (p.n_spins < 3) throw DomainError("star-bar model needs N >= 3");
  std::vector<Edge> edges{{0, 1}};
  std::vector<double> J{p.a};
  for (int hub = 0; hub < 2; ++hub) {
    for (int j = 2; j < p.n_spins; ++j) {
      edges.push_back({hub, j});
      J.push_back(p.b);
    }
  }
  std::vector<double> h(p.n_spins, 0.0);
  h[0] = h[1] = p.b;
  return SpinHamiltonian(Topology(p.n_spins, std::move(edges)), std::move(h), std::move(J));
}

Spectrum star_spectrum(const StarParams& p) {
  check_star(p);
  if (p.n_spins > 63) throw SizeError("star spectrum degeneracies need N <= 63");
  std::vector<Level> raw;
  int n1 = p.n_spins - 1;
  for (int k = 0; k <= n1; ++k) raw.push_back({p.a + 2.0 * p.b * (2.0 * k - n1), binomial(n1, k)});
  raw.push_back({-p.a, std::uint64_t{1} << n1});
  return Spectrum::merged(std::move(raw));
}

double star_log_z(const StarParams& p, double beta) {
  check_star(p);
  check_beta(beta);
  return analytic::star_log_z<double>(p.n_spins, p.a, p.b, beta);
}

double star_heat_capacity(const StarParams& p, double beta) {
  check_star(p);
  check_beta(beta);
  return analytic::star_heat_capacity<double>(p.n_spins, p.a, p.b, beta);
}

ThermalStats star_stats(const StarParams& p, double beta) {
  check_star(p);
  check_beta(beta);
  auto st = stats_from_log_z(
      [&](const auto& B) {
        using S = std::remove_cvref_t<decltype(B)>;
        return analytic::star_log_z<S>(p.n_spins, S(p.a), S(p.b), B);
      },
      beta);
  st.heat_capacity = star_heat_capacity(p, beta);
  st.energy_variance = st.heat_capacity / (beta * beta);
  return st;
}

SpinHamiltonian build_star_chain(const StarChainParams& p) {
  check_chain(p);
  const int n = p.n_units, m = p.leaves_per_unit, N = p.n_spins();
  if (N > kMaxSpins) throw SizeError("star-chain Hamiltonian exceeds the spin cap");
  std::vector<Edge> edges;
  std::vector<double> J;
  if (p.boundary == HubBoundary::periodic) {
    if (n == 2) {
      edges.push_back({0, 1});
      J.push_back(2.0 * p.j);
    } else if (n >= 3) {
      for (int a = 0; a < n; ++a) {
        edges.push_back({a, (a + 1) % n});
        J.push_back(p.j);
      }
    }
  } else {
    for (int a = 0; a + 1 < n; ++a) {
      edges.push_back({a, a + 1});
      J.push_back(p.j);
    }
  }
  std::vector<double> h(N, p.b);
  for (int a = 0; a < n; ++a) {
    h[a] = p.a;
    for (int i = 0; i < m; ++i) {
      edges.push_back({a, n + a * m + i});
      J.push_back(p.b);
    }
  }
  return SpinHamiltonian(Topology(N, std::move(edges)), std::move(h), std::move(J));
}

double star_chain_log_z(const StarChainParams& p, double beta) {
  check_chain(p);
  check_beta(beta);
  return analytic::star_chain_log_z<double>(p.n_units, p.leaves_per_unit, p.a, p.b, p.j, beta, p.boundary);
}

ThermalStats star_chain_stats(const StarChainParams& p, double beta) {
  check_chain(p);
  check_beta(beta);
  return stats_from_log_z(
      [&](const auto& B) {
        using S = std::remove_cvref_t<decltype(B)>;
        return analytic::star_chain_log_z<S>(p.n_units, p.leaves_per_unit, S(p.a), S(p.b), S(p.j), B,
                                             p.boundary);
      },
      beta);
}

double star_chain_heat_capacity(const StarChainParams& p, double beta) {
  return star_chain_stats(p, beta).heat_capacity;
}

std::pair<double, double> star_chain_transfer_eigenvalues(const StarChainParams& p, double beta) {
  check_chain(p);
  check_beta(beta);
  double lu, ld;
  analytic::hub_log_weights<double>(p.leaves_per_unit, p.a, p.b, beta, lu, ld);
  double vu = std::exp(lu), vd = std::exp(ld);
  double em = std::exp(-beta * p.j), ep = std::exp(beta * p.j);
  double tr = em * (vu + vd);
  double disc = std::sqrt(em * em * (vu - vd) * (vu - vd) / 4.0 + vu * vd * ep * ep);
  double lp = tr / 2.0 + disc;
  double det = vu * vd * (em * em - ep * ep);
  return {lp, det / lp};
}

Spectrum star_chain_spectrum(const StarChainParams& p) {
  check_chain(p);
  const int n = p.n_units, m = p.leaves_per_unit;
  if (n > 20) throw SizeError("star-chain spectrum enumerates 2^n hub states; n must be <= 20");
  if (n * (m + 1) > 63) throw SizeError("star-chain spectrum degeneracies need n(m+1) <= 63");
  std::vector<Level> raw;
  for (std::uint64_t hubs = 0; hubs < (std::uint64_t{1} << n); ++hubs) {
    double e = 0.0;
    int n_up = 0;
    for (int a = 0; a < n; ++a) {
      int s = spin_value(hubs, a);
      n_up += s > 0;
      e += p.a * s;
    }
    auto bond = [&](int x, int y) { return double(spin_value(hubs, x) * spin_value(hubs, y)); };
    if (p.boundary == HubBoundary::periodic) {
      if (n == 2) e += 2.0 * p.j * bond(0, 1);
      if (n >= 3)
        for (int a = 0; a < n; ++a) e += p.j * bond(a, (a + 1) % n);
    } else {
      for (int a = 0; a + 1 < n; ++a) e += p.j * bond(a, a + 1);
    }
    int active = m * n_up;
    std::uint64_t free_leaves = std::uint64_t{1} << ((n - n_up) * m);
    for (int mu = 0; mu <= active; ++mu) {
      raw.push_back({e + 2.0 * p.b * (2.0 * mu - active), free_leaves * binomial(active, mu)});
    }
  }
  return Spectrum::merged(std::move(raw));
}

SpinHamiltonian build_ising_1d(double h, double j, int n_spins) {
  if (n_spins < 3) throw DomainError("periodic Ising chain needs N >= 3");
  auto topo = Topology::ring(n_spins);
  return SpinHamiltonian(topo, std::vector<double>(n_spins, -h), std::vector<double>(topo.size(), -j));
}

ThermalStats ising_1d_stats(double h, double j, int n_spins, double beta) {
  if (n_spins < 3) throw DomainError("periodic Ising chain needs N >= 3");
  check_beta(beta);
  return stats_from_log_z(
      [&](const auto& B) {
        using S = std::remove_cvref_t<decltype(B)>;
        return analytic::ising_1d_log_z<S>(n_spins, S(h), S(j), B);
      },
      beta);
}

SpinHamiltonian build_all_to_all(double h, double j, int n_spins) {
  if (n_spins < 2) throw DomainError("all-to-all model needs N >= 2");
  auto topo = Topology::complete(n_spins);
  return SpinHamiltonian(topo, std::vector<double>(n_spins, -h), std::vector<double>(topo.size(), -j));
}

Spectrum all_to_all_spectrum(double h, double j, int n_spins) {
  if (n_spins < 2) throw DomainError("all-to-all model needs N >= 2");
  if (n_spins > 63) throw SizeError("all-to-all spectrum degeneracies need N <= 63");
  std::vector<Level> raw;
  const long long n = n_spins;
  for (long long k = 0; k <= n; ++k) {
    double e = h * double(n - 2 * k) + 0.5 * j * double(4 * k * (n - k) - n * (n - 1));
    raw.push_back({e, binomial(n_spins, int(k))});
  }
  return Spectrum::merged(std::move(raw));
}

ThermalStats all_to_all_stats(double h, double j, int n_spins, double beta) {
  if (n_spins < 2) throw DomainError("all-to-all model needs N >= 2");
  check_beta(beta);
  std::vector<LogLevel> levels;
  const long long n = n_spins;
  for (long long k = 0; k <= n; ++k) {
    double lg = std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) - std::lgamma(double(n - k) + 1);
    double e = h * double(n - 2 * k) + 0.5 * j * double(4 * k * (n - k) - n * (n - 1));
    levels.push_back({e, lg});
  }
  return thermal_stats(std::span<const LogLevel>(levels), beta);
}

double ksat_reference_curve(int n_spins) {
  if (n_spins < 4 || n_spins % 2 != 0) {
    std::ostringstream msg;
    msg << "k-SAT reference curve needs even N >= 4, got " << n_spins;
    throw DomainError(msg.str());
  }
  return c_opt_spins(n_spins / 2);
}

}  // namespace spinthermo
