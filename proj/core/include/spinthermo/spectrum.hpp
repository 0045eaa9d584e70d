#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace spinthermo {

// Absolute tolerance used to merge raw energies into levels, applied after
// shifting the ground energy to zero.
inline constexpr double kLevelMergeTolerance = 1e-9;

struct Level {
  double energy = 0.0;
  std::uint64_t degeneracy = 1;
};

// Level whose degeneracy is only known through its logarithm (binomials of
// large N overflow 64 bits).
struct LogLevel {
  double energy = 0.0;
  double log_degeneracy = 0.0;
};

// Sorted, merged, validated energy spectrum.
class Spectrum {
 public:
  Spectrum() = default;

  // Validates: ascending energies separated by more than the merge
  // tolerance, degeneracies >= 1, finite energies.
  explicit Spectrum(std::vector<Level> levels);

  // Sorts and merges coinciding energies. Nothing is shifted unless asked.
  static Spectrum merged(std::vector<Level> raw, bool shift_ground = false);
  static Spectrum from_energies(std::vector<double> energies, bool shift_ground = true);

  const std::vector<Level>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  const Level& operator[](std::size_t i) const { return levels_[i]; }
  std::uint64_t total_dim() const { return total_dim_; }
  double ground_energy() const { return levels_.empty() ? 0.0 : levels_.front().energy; }

  Spectrum shifted(double c) const;
  Spectrum scaled(double lambda) const;

  friend bool operator==(const Spectrum& a, const Spectrum& b);

 private:
  std::vector<Level> levels_;
  std::uint64_t total_dim_ = 0;
};

struct ThermalStats {
  double beta = 1.0;
  double log_partition = 0.0;
  double mean_energy = 0.0;
  double energy_variance = 0.0;
  double heat_capacity = 0.0;
};

// Population of every level, in level order. Accepts unmerged level lists.
std::vector<double> gibbs_populations(std::span<const Level> levels, double beta);
std::vector<double> gibbs_populations(const Spectrum& s, double beta);

ThermalStats thermal_stats(std::span<const Level> levels, double beta);
ThermalStats thermal_stats(const Spectrum& s, double beta);
ThermalStats thermal_stats(std::span<const LogLevel> levels, double beta);

// Third central moment of the energy; validation of d C / d beta uses it.
double energy_third_central_moment(std::span<const Level> levels, double beta);

}  // namespace spinthermo
