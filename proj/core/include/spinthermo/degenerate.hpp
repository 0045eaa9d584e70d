#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spinthermo/spectrum.hpp"

namespace spinthermo {

// One ground state and a (dim-1)-fold excited level at `gap`.
struct DegenerateModel {
  std::uint64_t dim = 2;
  double gap = 1.0;

  std::vector<Level> levels() const;
};

// Root x > 2 of e^x (x-2) = (D-1)(x+2). Requires D >= 3.
double optimal_gap(std::uint64_t D);
// Same root expressed through ln(D-1), usable for D beyond 64 bits.
double optimal_gap_log(double log_dm1);

// x^2 e^x (D-1) / (D-1+e^x)^2 at the optimal gap. Requires D >= 3.
double c_opt(std::uint64_t D);
double c_opt_log(double log_dm1);
// c_opt(2^n) for any n >= 1; n = 1 falls back to the two-level maximum.
double c_opt_spins(int n);

// Maximum heat capacity of a two-level system {(0,1),(E,1)} at beta = 1.
double single_spin_c_max();

// 1/(nu C): smallest achievable relative mean-square temperature error.
double estimation_error_bound(double C, long long nu);

using GapTemplate = std::function<std::vector<Level>(double gap)>;

struct GapOptimum {
  double gap = 0.0;
  double heat_capacity = 0.0;
};

// Maximizes C over the scalar gap of a template: log-spaced scan followed by
// golden-section refinement to 1e-10 in the gap.
GapOptimum max_c_over_gap(const GapTemplate& tmpl, double beta = 1.0, double lo = 1e-4,
                          double hi = 400.0);

// Golden-section maximization of f on [lo, hi].
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-10);

}  // namespace spinthermo
