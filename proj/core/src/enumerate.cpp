#include "spinthermo/enumerate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "spinthermo/error.hpp"
#include "spinthermo/parallel.hpp"

namespace spinthermo {
namespace {

void check_size(const SpinHamiltonian& hm, int cap) {
  if (hm.n_spins() > cap) {
    std::ostringstream msg;
    msg << "exact enumeration is capped at N = " << cap << ", got N = " << hm.n_spins();
    throw SizeError(msg.str());
  }
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("inverse temperature must be positive");
}

struct Segmentation {
  std::uint64_t count;
  std::uint64_t length;
};

Segmentation segments_for(int n_spins) {
  std::uint64_t total = std::uint64_t{1} << n_spins;
  std::uint64_t count = std::min(total, kTourSegments);
  return {count, total / count};
}

}  // namespace

GrayTour::GrayTour(const SpinHamiltonian& hm, std::uint64_t start_step)
    : hm_(&hm), t_(start_step), config_(gray(start_step)), energy_(hm.energy(config_)) {
  const int n = hm.n_spins();
  signs_.resize(hm.num_parameters());
  for (int i = 0; i < n; ++i) signs_[i] = spin_value(config_, i);
  const auto& edges = hm.topology().edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    signs_[n + k] = spin_value(config_, edges[k].i) * spin_value(config_, edges[k].j);
  }
}

void GrayTour::advance() {
  const int i = std::countr_zero(t_ + 1);
  const int n = hm_->n_spins();
  const auto& J = hm_->couplings();
  double terms = hm_->fields()[i] * signs_[i];
  signs_[i] = -signs_[i];
  for (auto k : hm_->topology().incidence()[i]) {
    terms += J[k] * signs_[n + k];
    signs_[n + k] = -signs_[n + k];
  }
  energy_ -= 2.0 * terms;
  config_ ^= std::uint64_t{1} << i;
  last_ = i;
  ++t_;
}

MomentAccumulator::MomentAccumulator(double beta_, std::size_t n_params)
    : beta(beta_), a0(n_params, 0.0), a1(n_params, 0.0), a2(n_params, 0.0) {}

void MomentAccumulator::rebase(double new_shift) {
  if (empty) {
    shift = new_shift;
    return;
  }
  const double d = shift - new_shift;
  const double f = std::exp(-beta * d);
  const double d2 = d * d;
  s[3] = f * (s[3] + 3.0 * d * s[2] + 3.0 * d2 * s[1] + d2 * d * s[0]);
  s[2] = f * (s[2] + 2.0 * d * s[1] + d2 * s[0]);
  s[1] = f * (s[1] + d * s[0]);
  s[0] = f * s[0];
  for (std::size_t k = 0; k < a0.size(); ++k) {
    a2[k] = f * (a2[k] + 2.0 * d * a1[k] + d2 * a0[k]);
    a1[k] = f * (a1[k] + d * a0[k]);
    a0[k] = f * a0[k];
  }
  shift = new_shift;
}

namespace {

struct Weights {
  double w, we, we2;
};

inline Weights push_scalar(MomentAccumulator& acc, double energy) {
  if (acc.empty) {
    acc.shift = energy;
    acc.empty = false;
  } else if (energy < acc.shift) {
    acc.rebase(energy);
  }
  const double e = energy - acc.shift;
  const double w = std::exp(-acc.beta * e);
  const double we = w * e;
  const double we2 = we * e;
  acc.s[0] += w;
  acc.s[1] += we;
  acc.s[2] += we2;
  acc.s[3] += we2 * e;
  return {w, we, we2};
}

}  // namespace

void MomentAccumulator::add(double energy) { push_scalar(*this, energy); }

void MomentAccumulator::add(double energy, const std::vector<double>& signs) {
  const auto [w, we, we2] = push_scalar(*this, energy);
  const std::size_t P = a0.size();
  double* __restrict p0 = a0.data();
  double* __restrict p1 = a1.data();
  double* __restrict p2 = a2.data();
  const double* __restrict sg = signs.data();
  for (std::size_t k = 0; k < P; ++k) {
    p0[k] += sg[k] * w;
    p1[k] += sg[k] * we;
    p2[k] += sg[k] * we2;
  }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.empty) return;
  if (empty) {
    *this = other;
    return;
  }
  MomentAccumulator rhs = other;
  const double m = std::min(shift, rhs.shift);
  rebase(m);
  rhs.rebase(m);
  for (int i = 0; i < 4; ++i) s[i] += rhs.s[i];
  for (std::size_t k = 0; k < a0.size(); ++k) {
    a0[k] += rhs.a0[k];
    a1[k] += rhs.a1[k];
    a2[k] += rhs.a2[k];
  }
}

double MomentAccumulator::log_partition() const { return -beta * shift + std::log(s[0]); }

ThermalStats MomentAccumulator::stats() const {
  ThermalStats st;
  st.beta = beta;
  st.log_partition = log_partition();
  const double m1 = s[1] / s[0];
  st.mean_energy = shift + m1;
  st.energy_variance = std::max(0.0, s[2] / s[0] - m1 * m1);
  st.heat_capacity = beta * beta * st.energy_variance;
  return st;
}

double MomentAccumulator::third_central_moment() const {
  const double m1 = s[1] / s[0], m2 = s[2] / s[0], m3 = s[3] / s[0];
  return m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
}

std::map<std::pair<int, int>, double> GradientRecord::coupling_map() const {
  std::map<std::pair<int, int>, double> out;
  for (std::size_t k = 0; k < edges.size(); ++k) out[{edges[k].i, edges[k].j}] = d_c_d_coupling[k];
  return out;
}

std::vector<double> GradientRecord::flat() const {
  std::vector<double> g(d_c_d_field);
  g.insert(g.end(), d_c_d_coupling.begin(), d_c_d_coupling.end());
  return g;
}

MomentAccumulator enumerate_moments(const SpinHamiltonian& hm, double beta, bool with_gradient,
                                    int threads) {
  check_size(hm, kMaxSpins);
  check_beta(beta);
  const auto seg = segments_for(hm.n_spins());
  const std::size_t P = with_gradient ? hm.num_parameters() : 0;
  std::vector<MomentAccumulator> parts(seg.count);
  parallel_for(seg.count, threads, [&](std::size_t s) {
    MomentAccumulator acc(beta, P);
    GrayTour tour(hm, s * seg.length);
    for (std::uint64_t t = 0;; ++t) {
      if (with_gradient) acc.add(tour.energy(), tour.signs()); else acc.add(tour.energy());
      if (t + 1 == seg.length) break;
      tour.advance();
    }
    parts[s] = std::move(acc);
  });
  MomentAccumulator total = std::move(parts[0]);
  for (std::size_t s = 1; s < parts.size(); ++s) total.merge(parts[s]);
  for (double x : total.s) {
    if (!std::isfinite(x)) throw NumericalError("non-finite moment during enumeration");
  }
  return total;
}

ThermalStats enumerate_stats(const SpinHamiltonian& hm, double beta, int threads) {
  return enumerate_moments(hm, beta, false, threads).stats();
}

std::pair<ThermalStats, GradientRecord> enumerate_gradient(const SpinHamiltonian& hm, double beta,
                                                           int threads) {
  const auto acc = enumerate_moments(hm, beta, true, threads);
  const auto st = acc.stats();
  const double z = acc.s[0];
  const double m1 = acc.s[1] / z, m2 = acc.s[2] / z;
  const std::size_t P = hm.num_parameters();
  std::vector<double> g(P);
  for (std::size_t k = 0; k < P; ++k) {
    const double f = acc.a0[k] / z, ef = acc.a1[k] / z, e2f = acc.a2[k] / z;
    const double d1 = f - beta * (ef - m1 * f);
    const double d2 = 2.0 * ef - beta * (e2f - m2 * f);
    g[k] = beta * beta * (d2 - 2.0 * m1 * d1);
    if (!std::isfinite(g[k])) throw NumericalError("non-finite heat-capacity gradient");
  }
  GradientRecord rec;
  const auto n = static_cast<std::size_t>(hm.n_spins());
  rec.d_c_d_field.assign(g.begin(), g.begin() + n);
  rec.d_c_d_coupling.assign(g.begin() + n, g.end());
  rec.edges = hm.topology().edges();
  return {st, rec};
}

Spectrum enumerate_spectrum(const SpinHamiltonian& hm, int threads) {
  check_size(hm, kMaxSpectrumSpins);
  const auto seg = segments_for(hm.n_spins());
  std::vector<std::vector<Level>> parts(seg.count);
  parallel_for(seg.count, threads, [&](std::size_t s) {
    std::vector<double> energies;
    energies.reserve(seg.length);
    GrayTour tour(hm, s * seg.length);
    for (std::uint64_t t = 0;; ++t) {
      energies.push_back(tour.energy());
      if (t + 1 == seg.length) break;
      tour.advance();
    }
    std::sort(energies.begin(), energies.end());
    std::vector<Level> levels;
    double anchor = 0.0;
    for (double e : energies) {
      if (!levels.empty() && e - anchor <= kLevelMergeTolerance) {
        ++levels.back().degeneracy;
      } else {
        levels.push_back({e, 1});
        anchor = e;
      }
    }
    parts[s] = std::move(levels);
  });
  std::vector<Level> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  std::stable_sort(all.begin(), all.end(), [](const Level& a, const Level& b) { return a.energy < b.energy; });
  return Spectrum::merged(std::move(all), true);
}

LevelStatistics level_statistics(const SpinHamiltonian& hm, double beta, int threads) {
  check_beta(beta);
  const auto spec = enumerate_spectrum(hm, threads);
  const auto p = gibbs_populations(spec, beta);
  LevelStatistics out;
  out.p_ground = p[0];
  out.p_first_excited = p.size() > 1 ? p[1] : 0.0;
  double tail = 0.0;
  for (std::size_t i = 2; i < p.size(); ++i) tail += p[i];
  out.p_tail = tail;
  return out;
}

}  // namespace spinthermo
