#include "spinthermo/chimera.hpp"

#include "spinthermo/error.hpp"

namespace spinthermo {

Topology chimera_topology(int units) {
  if (units < 1) throw DomainError("Chimera topology needs at least one unit");
  std::vector<Edge> edges;
  for (int u = 0; u < units; ++u) {
    for (int l = 0; l < 4; ++l)
      for (int r = 4; r < 8; ++r) edges.push_back({chimera_site(u, l), chimera_site(u, r)});
  }
  for (int u = 0; u + 1 < units; ++u) {
    for (int k = 0; k < 4; ++k) edges.push_back({chimera_site(u, 4 + k), chimera_site(u + 1, k)});
  }
  return Topology(8 * units, std::move(edges));
}

ChimeraEmbedding star_chain_chimera_embedding(int n_hubs) {
  if (n_hubs < 1) throw DomainError("embedding needs at least one hub");
  ChimeraEmbedding emb;
  emb.units = (n_hubs + 1) / 2;
  for (int a = 0; a < n_hubs; ++a) {
    int u = a / 2;
    if (a % 2 == 0) {
      emb.hubs.push_back(chimera_site(u, 0));
      emb.leaves.push_back({chimera_site(u, 5), chimera_site(u, 6), chimera_site(u, 7)});
    } else {
      emb.hubs.push_back(chimera_site(u, 4));
      emb.leaves.push_back({chimera_site(u, 1), chimera_site(u, 2), chimera_site(u, 3)});
    }
  }
  return emb;
}

SpinHamiltonian embed_star_chain(const StarChainParams& p, int units) {
  if (p.leaves_per_unit != 3) throw DomainError("Chimera embedding supports m = 3 only");
  if (p.boundary != HubBoundary::open) throw DomainError("Chimera embedding needs an open hub chain");
  auto emb = star_chain_chimera_embedding(p.n_units);
  if (emb.units > units) throw DomainError("star-chain does not fit in the requested Chimera strip");
  SpinHamiltonian hm(chimera_topology(units));
  for (int a = 0; a < p.n_units; ++a) {
    hm = hm.with_field(emb.hubs[a], p.a);
    for (int leaf : emb.leaves[a]) {
      hm = hm.with_field(leaf, p.b).with_coupling(emb.hubs[a], leaf, p.b);
    }
    if (a + 1 < p.n_units) hm = hm.with_coupling(emb.hubs[a], emb.hubs[a + 1], p.j);
  }
  return hm;
}

}  // namespace spinthermo
