#pragma once

#include <vector>

#include "spinthermo/hamiltonian.hpp"
#include "spinthermo/models.hpp"

namespace spinthermo {

// Global index of unit-local spin `local` (0..7) in unit `unit`.
inline int chimera_site(int unit, int local) { return 8 * unit + local; }

// K_{4,4} per unit between locals 0-3 and 4-7, plus inter-unit edges from
// local 4+k of unit u to local k of unit u+1.
Topology chimera_topology(int units);

// Sites of an open m = 3 star-chain placed on a Chimera strip: two hubs per
// unit, even hubs on local 0 with leaves on 5-7, odd hubs on local 4 with
// leaves on 1-3.
struct ChimeraEmbedding {
  std::vector<int> hubs;
  std::vector<std::vector<int>> leaves;
  int units = 0;
};

ChimeraEmbedding star_chain_chimera_embedding(int n_hubs);

// Renders an open m = 3 star-chain onto the Chimera topology of `units`
// units; unused couplings and fields are zero.
SpinHamiltonian embed_star_chain(const StarChainParams& p, int units);

}  // namespace spinthermo
