#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace spinthermo {

inline constexpr int kMaxSpins = 30;

struct Edge {
  int i = 0;
  int j = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Allowed coupling pairs over n spins. Edges are stored with i < j in
// insertion order; that order fixes the coupling-parameter layout.
class Topology {
 public:
  Topology() = default;
  Topology(int n_spins, std::vector<Edge> edges);

  static Topology complete(int n_spins);
  static Topology ring(int n_spins);
  static Topology empty(int n_spins);

  int n_spins() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  std::optional<std::size_t> index_of(int i, int j) const;
  bool contains(int i, int j) const { return index_of(i, j).has_value(); }
  // Edge indices incident to each spin.
  const std::vector<std::vector<std::size_t>>& incidence() const { return incidence_; }

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::map<std::pair<int, int>, std::size_t> lookup_;
  std::vector<std::vector<std::size_t>> incidence_;
};

// E(s) = sum_i h_i s_i + sum_{(i,j)} J_ij s_i s_j with s_i = +1 when bit i of
// the configuration is set.
class SpinHamiltonian {
 public:
  SpinHamiltonian() = default;
  explicit SpinHamiltonian(Topology topology);
  SpinHamiltonian(Topology topology, std::vector<double> fields, std::vector<double> couplings);

  int n_spins() const { return topology_.n_spins(); }
  const Topology& topology() const { return topology_; }
  const std::vector<double>& fields() const { return fields_; }
  // Aligned with topology().edges().
  const std::vector<double>& couplings() const { return couplings_; }
  double field(int i) const { return fields_.at(i); }
  double coupling(int i, int j) const;
  std::map<std::pair<int, int>, double> coupling_map(bool nonzero_only = true) const;

  std::size_t num_parameters() const { return fields_.size() + couplings_.size(); }
  // Fields first, then couplings in edge order.
  std::vector<double> parameters() const;
  SpinHamiltonian with_parameters(const std::vector<double>& theta) const;
  SpinHamiltonian with_field(int i, double h) const;
  SpinHamiltonian with_coupling(int i, int j, double J) const;

  double energy(std::uint64_t config) const;
  // Local field h_i + sum_j J_ij s_j seen by spin i.
  double local_field(int i, std::uint64_t config) const;

  friend bool operator==(const SpinHamiltonian& a, const SpinHamiltonian& b) {
    return a.topology_ == b.topology_ && a.fields_ == b.fields_ && a.couplings_ == b.couplings_;
  }

 private:
  void validate() const;

  Topology topology_;
  std::vector<double> fields_;
  std::vector<double> couplings_;
};

inline int spin_value(std::uint64_t config, int i) { return ((config >> i) & 1u) ? 1 : -1; }

}  // namespace spinthermo
