#include "spinthermo/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

#include "spinthermo/models.hpp"

namespace spinthermo {
namespace {

struct Fingerprint {
  std::vector<double> fields;
  std::vector<double> coupling_sums;
};

Fingerprint fingerprint(const SpinHamiltonian& hm) {
  Fingerprint f;
  f.fields = hm.fields();
  std::sort(f.fields.begin(), f.fields.end());
  f.coupling_sums.assign(hm.n_spins(), 0.0);
  const auto& edges = hm.topology().edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    f.coupling_sums[edges[k].i] += std::abs(hm.couplings()[k]);
    f.coupling_sums[edges[k].j] += std::abs(hm.couplings()[k]);
  }
  std::sort(f.coupling_sums.begin(), f.coupling_sums.end());
  return f;
}

double scale_of(const SpinHamiltonian& hm) {
  double s = 0.0;
  for (double x : hm.fields()) s = std::max(s, std::abs(x));
  for (double x : hm.couplings()) s = std::max(s, std::abs(x));
  return s;
}

double mismatch(const SpinHamiltonian& a, const SpinHamiltonian& b) {
  auto fa = fingerprint(gauge_normalize(a)), fb = fingerprint(gauge_normalize(b));
  double scale = std::max(scale_of(a), scale_of(b));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < fa.fields.size(); ++i) {
    worst = std::max(worst, std::abs(fa.fields[i] - fb.fields[i]) / scale);
    // Coupling sums grow with degree; compare per incident edge.
    worst = std::max(worst, std::abs(fa.coupling_sums[i] - fb.coupling_sums[i]) / (scale * std::max(1, a.n_spins() - 1)));
  }
  return worst;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

// Adjacency over significant couplings.
struct Graph {
  std::vector<std::vector<int>> adj;
  std::vector<std::vector<double>> weight;
  int edges = 0;
};

Graph significant_graph(const SpinHamiltonian& hm, double threshold) {
  Graph g;
  g.adj.assign(hm.n_spins(), {});
  g.weight.assign(hm.n_spins(), {});
  const auto& edges = hm.topology().edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    double J = hm.couplings()[k];
    if (std::abs(J) <= threshold) continue;
    g.adj[edges[k].i].push_back(edges[k].j);
    g.adj[edges[k].j].push_back(edges[k].i);
    g.weight[edges[k].i].push_back(J);
    g.weight[edges[k].j].push_back(J);
    ++g.edges;
  }
  return g;
}

// Renders a reference Hamiltonian on the complete graph so fingerprints of
// different topologies are comparable.
SpinHamiltonian on_complete(const SpinHamiltonian& hm) {
  SpinHamiltonian out(Topology::complete(hm.n_spins()));
  out = out.with_parameters([&] {
    std::vector<double> th(hm.fields());
    th.resize(out.num_parameters(), 0.0);
    return th;
  }());
  for (const auto& [key, J] : hm.coupling_map()) out = out.with_coupling(key.first, key.second, J);
  return out;
}

std::optional<StructureVerdict> try_all_to_all(const SpinHamiltonian& hm, const Graph& g, double tol) {
  const int N = hm.n_spins();
  if (N < 2 || g.edges != N * (N - 1) / 2) return std::nullopt;
  std::vector<double> J;
  for (const auto& [key, v] : hm.coupling_map()) J.push_back(v);
  double h = mean(hm.fields()), j = mean(J);
  auto ref = build_all_to_all(-h, -j, N);
  double mm = mismatch(on_complete(hm), ref);
  if (mm > tol) return std::nullopt;
  StructureVerdict v;
  v.kind = StructureKind::all_to_all;
  // Raw energy convention of the gauge-normalized Hamiltonian.
  v.params = {{"field", h}, {"coupling", j}};
  v.mismatch = mm;
  return v;
}

std::optional<StructureVerdict> try_star(const SpinHamiltonian& hm, const Graph& g, double tol) {
  const int N = hm.n_spins();
  if (N < 3 || g.edges != N - 1) return std::nullopt;
  int hub = -1;
  for (int i = 0; i < N; ++i)
    if (static_cast<int>(g.adj[i].size()) == N - 1) hub = i;
  if (hub < 0) return std::nullopt;
  std::vector<double> leaf_fields, leaf_couplings;
  bool same_sign = true;
  for (int i = 0; i < N; ++i) {
    if (i == hub) continue;
    leaf_fields.push_back(hm.field(i));
    double J = hm.coupling(hub, i);
    leaf_couplings.push_back(std::abs(J));
    same_sign = same_sign && (J > 0.0) == (hm.field(i) > 0.0);
  }
  double b = 0.5 * (mean(leaf_fields) + mean(leaf_couplings));
  double a = same_sign ? hm.field(hub) : -hm.field(hub);
  auto ref = build_star({N, a, b});
  double mm = mismatch(on_complete(hm), on_complete(ref));
  if (mm > tol) return std::nullopt;
  StructureVerdict v;
  v.kind = StructureKind::star;
  v.params = {{"a", a}, {"b", b}};
  v.privileged = {hub};
  v.mismatch = mm;
  return v;
}

std::optional<StructureVerdict> try_star_bar(const SpinHamiltonian& hm, const Graph& g, double tol) {
  const int N = hm.n_spins();
  if (N < 4 || g.edges != 2 * (N - 2) + 1) return std::nullopt;
  std::vector<int> hubs;
  for (int i = 0; i < N; ++i)
    if (static_cast<int>(g.adj[i].size()) == N - 1) hubs.push_back(i);
  if (hubs.size() != 2) return std::nullopt;
  double a = hm.coupling(hubs[0], hubs[1]);
  double b = 0.5 * (hm.field(hubs[0]) + hm.field(hubs[1]));
  auto ref = build_star_bar({N, a, b});
  double mm = mismatch(on_complete(hm), on_complete(ref));
  if (mm > tol) return std::nullopt;
  StructureVerdict v;
  v.kind = StructureKind::star_bar;
  v.params = {{"a", a}, {"b", b}};
  v.privileged = hubs;
  v.mismatch = mm;
  return v;
}

std::optional<StructureVerdict> try_star_chain(const SpinHamiltonian& hm, const Graph& g, double tol) {
  const int N = hm.n_spins();
  std::vector<int> hubs;
  std::vector<int> leaf_count(N, 0);
  for (int i = 0; i < N; ++i) {
    if (g.adj[i].size() == 1 && g.adj[g.adj[i][0]].size() > 1) ++leaf_count[g.adj[i][0]];
  }
  for (int i = 0; i < N; ++i)
    if (leaf_count[i] > 0) hubs.push_back(i);
  if (hubs.size() < 2) return std::nullopt;
  const int m = leaf_count[hubs[0]];
  for (int h : hubs)
    if (leaf_count[h] != m) return std::nullopt;
  if (static_cast<int>(hubs.size()) * (m + 1) != N) return std::nullopt;
  std::set<int> hub_set(hubs.begin(), hubs.end());
  // Hub-hub edges must form a path (open) or a ring. Each unit is a Star:
  // leaf fields and hub-leaf couplings share one magnitude b per hub, while
  // hub fields, b and the hub couplings may vary from unit to unit.
  const double scale = scale_of(hm);
  int hub_edges = 0;
  double worst = 0.0;
  std::vector<double> hub_J, unit_b, hub_fields;
  for (int h : hubs) {
    int hub_deg = 0;
    hub_fields.push_back(hm.field(h));
    std::vector<double> mags;
    for (std::size_t q = 0; q < g.adj[h].size(); ++q) {
      int o = g.adj[h][q];
      if (hub_set.count(o)) {
        ++hub_deg;
        if (o > h) {
          ++hub_edges;
          hub_J.push_back(g.weight[h][q]);
        }
      } else {
        mags.push_back(std::abs(hm.field(o)));
        mags.push_back(std::abs(g.weight[h][q]));
      }
    }
    if (hub_deg < 1 || hub_deg > 2) return std::nullopt;
    const double b = mean(mags);
    for (double x : mags) worst = std::max(worst, std::abs(x - b) / scale);
    unit_b.push_back(b);
  }
  const int n = static_cast<int>(hubs.size());
  if (g.edges != hub_edges + n * m) return std::nullopt;
  HubBoundary boundary;
  if (hub_edges == n - 1) boundary = HubBoundary::open;
  else if (hub_edges == n && n >= 3) boundary = HubBoundary::periodic;
  else return std::nullopt;
  if (worst > tol) return std::nullopt;
  auto spread = [&](const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / scale;
  };
  StructureVerdict v;
  v.kind = StructureKind::star_chain;
  v.params = {{"a", mean(hub_fields)}, {"b", mean(unit_b)},       {"j", mean(hub_J)},
              {"m", double(m)},         {"n", double(n)},           {"a_spread", spread(hub_fields)},
              {"b_spread", spread(unit_b)}, {"j_spread", spread(hub_J)}};
  v.privileged = hubs;
  v.mismatch = worst;
  v.label = "star-chain m=" + std::to_string(m) + (boundary == HubBoundary::open ? " open" : " periodic");
  return v;
}

}  // namespace

SpinHamiltonian gauge_normalize(const SpinHamiltonian& hm) {
  const int N = hm.n_spins();
  std::vector<double> h = hm.fields(), J = hm.couplings();
  std::vector<int> flip(N, 0);
  for (int i = 0; i < N; ++i) {
    if (h[i] < 0.0) {
      flip[i] = 1;
      h[i] = -h[i];
    }
  }
  const auto& edges = hm.topology().edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (flip[edges[k].i] ^ flip[edges[k].j]) J[k] = -J[k];
  }
  return SpinHamiltonian(hm.topology(), std::move(h), std::move(J));
}

std::string to_string(StructureKind k) {
  switch (k) {
    case StructureKind::all_to_all: return "all-to-all";
    case StructureKind::star: return "star";
    case StructureKind::star_bar: return "star-bar";
    case StructureKind::star_chain: return "star-chain";
    case StructureKind::other: return "other";
  }
  return "other";
}

StructureVerdict detect_structure(const SpinHamiltonian& raw, const StructureOptions& opt) {
  const auto hm = gauge_normalize(raw);
  const double threshold = opt.significance * scale_of(hm);
  const auto g = significant_graph(hm, threshold);
  // Zero sub-threshold entries before fitting so residual noise does not
  // leak into the fingerprints.
  std::vector<double> h = hm.fields(), J = hm.couplings();
  for (auto& x : h)
    if (std::abs(x) <= threshold) x = 0.0;
  for (auto& x : J)
    if (std::abs(x) <= threshold) x = 0.0;
  const SpinHamiltonian clean(hm.topology(), h, J);
  for (auto attempt : {try_all_to_all, try_star, try_star_bar, try_star_chain}) {
    if (auto v = attempt(clean, g, opt.tolerance)) {
      if (v->label.empty()) v->label = to_string(v->kind);
      v->mismatch = std::max(v->mismatch, mismatch(hm, clean));
      if (v->mismatch <= opt.tolerance) return *v;
    }
  }
  StructureVerdict v;
  v.label = "other";
  return v;
}

}  // namespace spinthermo
