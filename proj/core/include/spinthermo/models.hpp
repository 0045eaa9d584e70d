#pragma once

#include <map>
#include <string>
#include <vector>

#include "spinthermo/analytic.hpp"
#include "spinthermo/hamiltonian.hpp"
#include "spinthermo/spectrum.hpp"

namespace spinthermo {

using analytic::HubBoundary;

// a s_1 + b sum_{i>=2} s_i (1 + s_1)
struct StarParams {
  int n_spins = 2;
  double a = 0.0;
  double b = 0.0;
};

// n hubs with field a coupled by J, each carrying m leaves with field b and
// hub-leaf coupling b. Periodic closes the hub ring.
struct StarChainParams {
  int n_units = 1;
  int leaves_per_unit = 1;
  double a = 0.0;
  double b = 0.0;
  double j = 0.0;
  HubBoundary boundary = HubBoundary::periodic;

  int n_spins() const { return n_units * (leaves_per_unit + 1); }
};

struct ModelCurvePoint {
  int n_spins = 0;
  double c_max = 0.0;
  std::map<std::string, double> params;
};

SpinHamiltonian build_star(const StarParams& p);
Spectrum star_spectrum(const StarParams& p);
double star_log_z(const StarParams& p, double beta = 1.0);
double star_heat_capacity(const StarParams& p, double beta = 1.0);
ThermalStats star_stats(const StarParams& p, double beta = 1.0);

// a s_1 s_2 + b sum_{i=1,2} s_i (1 + sum_{j>=3} s_j); same spectrum as
// the Star with the same (a, b).
SpinHamiltonian build_star_bar(const StarParams& p);

SpinHamiltonian build_star_chain(const StarChainParams& p);
double star_chain_log_z(const StarChainParams& p, double beta = 1.0);
double star_chain_heat_capacity(const StarChainParams& p, double beta = 1.0);
ThermalStats star_chain_stats(const StarChainParams& p, double beta = 1.0);
// Exact spectrum by hub-configuration enumeration; n <= 20.
Spectrum star_chain_spectrum(const StarChainParams& p);
// Eigenvalues (lambda_+, lambda_-) of the periodic transfer matrix.
std::pair<double, double> star_chain_transfer_eigenvalues(const StarChainParams& p, double beta = 1.0);

// Periodic chain H = -h sum s - J sum s s'; N >= 3.
SpinHamiltonian build_ising_1d(double h, double j, int n_spins);
ThermalStats ising_1d_stats(double h, double j, int n_spins, double beta = 1.0);

// H = -h sum s - J sum_{i<j} s s'.
SpinHamiltonian build_all_to_all(double h, double j, int n_spins);
Spectrum all_to_all_spectrum(double h, double j, int n_spins);
ThermalStats all_to_all_stats(double h, double j, int n_spins, double beta = 1.0);

// c_opt(2^{N/2}); N even, N >= 4.
double ksat_reference_curve(int n_spins);

}  // namespace spinthermo
