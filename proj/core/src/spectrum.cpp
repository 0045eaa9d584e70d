#include "spinthermo/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spinthermo/error.hpp"

namespace spinthermo {
namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream msg;
    msg << "inverse temperature must be positive and finite, got " << beta;
    throw DomainError(msg.str());
  }
}

void check_levels(std::span<const Level> levels) {
  if (levels.empty()) throw ValidationError("spectrum has no levels");
  for (const auto& l : levels) {
    if (!std::isfinite(l.energy)) throw ValidationError("spectrum energy is not finite");
    if (l.degeneracy == 0) throw ValidationError("spectrum degeneracy must be >= 1");
  }
}

// Shared kernel over (energy, log weight) pairs.
template <class Energy, class LogWeight>
ThermalStats stats_kernel(std::size_t n, Energy energy, LogWeight log_weight, double beta) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = log_weight(i) - beta * energy(i);
    if (x > m) {
      m = x;
      top = i;
    }
  }
  // Energies are measured from the most populated level.
  const double ref = energy(top);
  double z = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = std::exp(log_weight(i) - beta * energy(i) - m);
    z += w;
    s1 += w * (energy(i) - ref);
  }
  const double mean_rel = s1 / z;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = std::exp(log_weight(i) - beta * energy(i) - m);
    double e = (energy(i) - ref) - mean_rel;
    s2 += w * e * e;
  }
  const double mean = ref + mean_rel;
  ThermalStats out;
  out.beta = beta;
  out.log_partition = m + std::log(z);
  out.mean_energy = mean;
  out.energy_variance = s2 / z;
  out.heat_capacity = beta * beta * out.energy_variance;
  return out;
}

}  // namespace

Spectrum::Spectrum(std::vector<Level> levels) : levels_(std::move(levels)) {
  check_levels(levels_);
  total_dim_ = 0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (i > 0 && !(levels_[i].energy - levels_[i - 1].energy > kLevelMergeTolerance)) {
      throw ValidationError("spectrum levels must be strictly ascending beyond the merge tolerance");
    }
    if (levels_[i].degeneracy > std::numeric_limits<std::uint64_t>::max() - total_dim_) {
      throw ValidationError("spectrum dimension overflows 64 bits");
    }
    total_dim_ += levels_[i].degeneracy;
  }
}

Spectrum Spectrum::merged(std::vector<Level> raw, bool shift_ground) {
  check_levels(raw);
  std::sort(raw.begin(), raw.end(),
            [](const Level& a, const Level& b) { return a.energy < b.energy; });
  double shift = shift_ground ? raw.front().energy : 0.0;
  std::vector<Level> out;
  double anchor = 0.0;
  for (const auto& l : raw) {
    double e = l.energy - shift;
    // Levels chain onto the first energy of their cluster so that drift
    // cannot accumulate across many nearby values.
    if (!out.empty() && e - anchor <= kLevelMergeTolerance) {
      out.back().degeneracy += l.degeneracy;
    } else {
      out.push_back({e, l.degeneracy});
      anchor = e;
    }
  }
  return Spectrum(std::move(out));
}

Spectrum Spectrum::from_energies(std::vector<double> energies, bool shift_ground) {
  std::vector<Level> raw;
  raw.reserve(energies.size());
  for (double e : energies) raw.push_back({e, 1});
  return merged(std::move(raw), shift_ground);
}

Spectrum Spectrum::shifted(double c) const {
  auto out = levels_;
  for (auto& l : out) l.energy += c;
  return merged(std::move(out));
}

Spectrum Spectrum::scaled(double lambda) const {
  auto out = levels_;
  for (auto& l : out) l.energy *= lambda;
  return merged(std::move(out));
}

bool operator==(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].degeneracy != b[i].degeneracy) return false;
    if (std::abs(a[i].energy - b[i].energy) > kLevelMergeTolerance) return false;
  }
  return true;
}

std::vector<double> gibbs_populations(std::span<const Level> levels, double beta) {
  check_beta(beta);
  check_levels(levels);
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& l : levels) {
    m = std::max(m, std::log(static_cast<double>(l.degeneracy)) - beta * l.energy);
  }
  std::vector<double> p(levels.size());
  double z = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    p[i] = std::exp(std::log(static_cast<double>(levels[i].degeneracy)) - beta * levels[i].energy - m);
    z += p[i];
  }
  for (auto& x : p) x /= z;
  return p;
}

std::vector<double> gibbs_populations(const Spectrum& s, double beta) {
  return gibbs_populations(std::span<const Level>(s.levels()), beta);
}

ThermalStats thermal_stats(std::span<const Level> levels, double beta) {
  check_beta(beta);
  check_levels(levels);
  std::vector<double> lw(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    lw[i] = std::log(static_cast<double>(levels[i].degeneracy));
  }
  return stats_kernel(
      levels.size(), [&](std::size_t i) { return levels[i].energy; },
      [&](std::size_t i) { return lw[i]; }, beta);
}

ThermalStats thermal_stats(const Spectrum& s, double beta) {
  return thermal_stats(std::span<const Level>(s.levels()), beta);
}

ThermalStats thermal_stats(std::span<const LogLevel> levels, double beta) {
  check_beta(beta);
  if (levels.empty()) throw ValidationError("spectrum has no levels");
  for (const auto& l : levels) {
    if (!std::isfinite(l.energy) || !std::isfinite(l.log_degeneracy)) {
      throw ValidationError("log-spectrum entry is not finite");
    }
  }
  return stats_kernel(
      levels.size(), [&](std::size_t i) { return levels[i].energy; },
      [&](std::size_t i) { return levels[i].log_degeneracy; }, beta);
}

double energy_third_central_moment(std::span<const Level> levels, double beta) {
  auto st = thermal_stats(levels, beta);
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& l : levels) {
    m = std::max(m, std::log(static_cast<double>(l.degeneracy)) - beta * l.energy);
  }
  double z = 0.0, s3 = 0.0;
  for (const auto& l : levels) {
    double w = std::exp(std::log(static_cast<double>(l.degeneracy)) - beta * l.energy - m);
    double e = l.energy - st.mean_energy;
    z += w;
    s3 += w * e * e * e;
  }
  return s3 / z;
}

}  // namespace spinthermo
