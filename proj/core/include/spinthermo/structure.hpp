#pragma once

#include <map>
#include <string>
#include <vector>

#include "spinthermo/hamiltonian.hpp"

namespace spinthermo {

// Flips every spin whose field is negative: h_i -> -h_i and J_ij -> -J_ij on
// its incident edges. The spectrum is unchanged.
SpinHamiltonian gauge_normalize(const SpinHamiltonian& hm);

enum class StructureKind { all_to_all, star, star_bar, star_chain, other };

std::string to_string(StructureKind k);

struct StructureVerdict {
  StructureKind kind = StructureKind::other;
  std::string label;
  // Family parameters estimated from the gauge-normalized Hamiltonian.
  std::map<std::string, double> params;
  // Hubs, the star centre, or the two star-bar spins.
  std::vector<int> privileged;
  // Largest fingerprint deviation relative to the parameter scale.
  double mismatch = 0.0;
};

struct StructureOptions {
  // Entries below this fraction of the largest |parameter| count as zero.
  double significance = 0.05;
  // Relative fingerprint match tolerance.
  double tolerance = 0.02;
};

// Permutation- and gauge-invariant classification: the input is gauge
// normalized, a candidate family is fitted, and the sorted field multiset
// and sorted per-spin coupling sums are compared with the candidate's.
StructureVerdict detect_structure(const SpinHamiltonian& hm, const StructureOptions& opt = {});

}  // namespace spinthermo
