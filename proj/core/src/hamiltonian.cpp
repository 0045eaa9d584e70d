#include "spinthermo/hamiltonian.hpp"

#include <cmath>
#include <sstream>

#include "spinthermo/error.hpp"

namespace spinthermo {

Topology::Topology(int n_spins, std::vector<Edge> edges) : n_(n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) {
    std::ostringstream msg;
    msg << "spin count must lie in [1, " << kMaxSpins << "], got " << n_spins;
    throw SizeError(msg.str());
  }
  incidence_.assign(n_, {});
  edges_.reserve(edges.size());
  for (auto e : edges) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 0 || e.j >= n_) throw ValidationError("edge endpoint out of range");
    if (e.i == e.j) throw ValidationError("self-couplings are not allowed");
    if (!lookup_.emplace(std::pair{e.i, e.j}, edges_.size()).second) {
      std::ostringstream msg;
      msg << "duplicate edge (" << e.i << ", " << e.j << ")";
      throw ValidationError(msg.str());
    }
    incidence_[e.i].push_back(edges_.size());
    incidence_[e.j].push_back(edges_.size());
    edges_.push_back(e);
  }
}

Topology Topology::complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  return Topology(n, std::move(e));
}

Topology Topology::ring(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  if (n >= 3) e.push_back({0, n - 1});
  return Topology(n, std::move(e));
}

Topology Topology::empty(int n) { return Topology(n, {}); }

std::optional<std::size_t> Topology::index_of(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = lookup_.find({i, j});
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

SpinHamiltonian::SpinHamiltonian(Topology topology)
    : topology_(std::move(topology)),
      fields_(topology_.n_spins(), 0.0),
      couplings_(topology_.size(), 0.0) {}

SpinHamiltonian::SpinHamiltonian(Topology topology, std::vector<double> fields,
                                 std::vector<double> couplings)
    : topology_(std::move(topology)), fields_(std::move(fields)), couplings_(std::move(couplings)) {
  validate();
}

void SpinHamiltonian::validate() const {
  if (static_cast<int>(fields_.size()) != topology_.n_spins()) {
    throw ValidationError("field array length differs from spin count");
  }
  if (couplings_.size() != topology_.size()) {
    throw ValidationError("coupling array length differs from edge count");
  }
  for (double h : fields_)
    if (!std::isfinite(h)) throw ValidationError("field is not finite");
  for (double J : couplings_)
    if (!std::isfinite(J)) throw ValidationError("coupling is not finite");
}

double SpinHamiltonian::coupling(int i, int j) const {
  auto k = topology_.index_of(i, j);
  return k ? couplings_[*k] : 0.0;
}

std::map<std::pair<int, int>, double> SpinHamiltonian::coupling_map(bool nonzero_only) const {
  std::map<std::pair<int, int>, double> out;
  for (std::size_t k = 0; k < couplings_.size(); ++k) {
    if (nonzero_only && couplings_[k] == 0.0) continue;
    out[{topology_.edges()[k].i, topology_.edges()[k].j}] = couplings_[k];
  }
  return out;
}

std::vector<double> SpinHamiltonian::parameters() const {
  std::vector<double> theta(fields_);
  theta.insert(theta.end(), couplings_.begin(), couplings_.end());
  return theta;
}

SpinHamiltonian SpinHamiltonian::with_parameters(const std::vector<double>& theta) const {
  if (theta.size() != num_parameters()) throw ValidationError("parameter vector has wrong length");
  std::vector<double> h(theta.begin(), theta.begin() + fields_.size());
  std::vector<double> J(theta.begin() + fields_.size(), theta.end());
  return SpinHamiltonian(topology_, std::move(h), std::move(J));
}

SpinHamiltonian SpinHamiltonian::with_field(int i, double h) const {
  auto out = *this;
  out.fields_.at(i) = h;
  out.validate();
  return out;
}

SpinHamiltonian SpinHamiltonian::with_coupling(int i, int j, double J) const {
  auto k = topology_.index_of(i, j);
  if (!k) {
    std::ostringstream msg;
    msg << "coupling (" << i << ", " << j << ") is not on the topology";
    throw ValidationError(msg.str());
  }
  auto out = *this;
  out.couplings_[*k] = J;
  out.validate();
  return out;
}

double SpinHamiltonian::energy(std::uint64_t config) const {
  double e = 0.0;
  for (int i = 0; i < n_spins(); ++i) e += fields_[i] * spin_value(config, i);
  const auto& edges = topology_.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    e += couplings_[k] * spin_value(config, edges[k].i) * spin_value(config, edges[k].j);
  }
  return e;
}

double SpinHamiltonian::local_field(int i, std::uint64_t config) const {
  double f = fields_[i];
  for (auto k : topology_.incidence()[i]) {
    const auto& e = topology_.edges()[k];
    int other = e.i == i ? e.j : e.i;
    f += couplings_[k] * spin_value(config, other);
  }
  return f;
}

}  // namespace spinthermo
