#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "spinthermo/hamiltonian.hpp"
#include "spinthermo/spectrum.hpp"

namespace spinthermo {

inline constexpr int kMaxSpectrumSpins = 26;

// The tour is always cut into this many contiguous segments (fewer for tiny
// N), independent of the worker count.
inline constexpr std::uint64_t kTourSegments = 64;

// Walks binary-reflected Gray-code states g(t) = t ^ (t >> 1) from a starting
// step, updating the energy and the sign of every parameter's derivative
// f_k = dE/dtheta_k in O(degree) per flip.
class GrayTour {
 public:
  GrayTour(const SpinHamiltonian& hm, std::uint64_t start_step);

  std::uint64_t step() const { return t_; }
  std::uint64_t config() const { return config_; }
  double energy() const { return energy_; }
  // +-1 per parameter (fields then couplings) for the current state.
  const std::vector<double>& signs() const { return signs_; }
  // Spin flipped by the last advance(), or -1 before the first.
  int last_flipped() const { return last_; }

  void advance();

  static std::uint64_t gray(std::uint64_t t) { return t ^ (t >> 1); }

 private:
  const SpinHamiltonian* hm_;
  std::uint64_t t_;
  std::uint64_t config_;
  double energy_;
  std::vector<double> signs_;
  int last_ = -1;
};

// Boltzmann-weighted moments over a set of states. Weights are kept relative
// to the lowest energy seen (`shift`), which is also the centre of the moments:
// s[m] = sum w (E - shift)^m, a_m[k] = sum w (E - shift)^m f_k.
struct MomentAccumulator {
  double beta = 1.0;
  double shift = 0.0;
  bool empty = true;
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::vector<double> a0, a1, a2;

  MomentAccumulator() = default;
  MomentAccumulator(double beta, std::size_t n_params);

  void add(double energy);
  void add(double energy, const std::vector<double>& signs);
  // Moves the centre down to `new_shift` (<= shift) and rescales weights.
  void rebase(double new_shift);
  // Fixed-order merge; the result does not depend on how states were split
  // as long as the sequence of merges is the same.
  void merge(const MomentAccumulator& other);

  double log_partition() const;
  ThermalStats stats() const;
  double third_central_moment() const;
};

struct GradientRecord {
  std::vector<double> d_c_d_field;
  // Aligned with the Hamiltonian's topology edges.
  std::vector<double> d_c_d_coupling;
  std::vector<Edge> edges;

  std::map<std::pair<int, int>, double> coupling_map() const;
  // Fields then couplings, matching SpinHamiltonian::parameters().
  std::vector<double> flat() const;
};

struct LevelStatistics {
  double p_ground = 0.0;
  double p_first_excited = 0.0;
  double p_tail = 0.0;
};

// threads <= 0 means one worker per logical core.
ThermalStats enumerate_stats(const SpinHamiltonian& hm, double beta, int threads = 0);
std::pair<ThermalStats, GradientRecord> enumerate_gradient(const SpinHamiltonian& hm, double beta,
                                                           int threads = 0);
MomentAccumulator enumerate_moments(const SpinHamiltonian& hm, double beta, bool with_gradient,
                                    int threads = 0);
Spectrum enumerate_spectrum(const SpinHamiltonian& hm, int threads = 0);
LevelStatistics level_statistics(const SpinHamiltonian& hm, double beta, int threads = 0);

}  // namespace spinthermo
