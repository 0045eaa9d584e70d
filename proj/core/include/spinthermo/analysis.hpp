#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spinthermo/models.hpp"
#include "spinthermo/optimizer.hpp"
#include "spinthermo/spectrum.hpp"

namespace spinthermo {

// (ln d)^2 (1+eps)^2 / (4 cosh^2(eps ln d / 2)): variance of {(0,1), ((1+eps) ln d, d)}.
double uniform_shift_variance(std::uint64_t d, double eps);
std::vector<Level> uniform_shift_levels(std::uint64_t d, double eps);

struct CurvePoint {
  double n = 0.0;
  double value = 0.0;
  std::map<std::string, double> params;
};

struct PowerFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  // RMS residual of ln(value).
  double residual = 0.0;
  double n_lo = 0.0;
  double n_hi = 0.0;
  int points = 0;
};

struct ScalingCurve {
  std::string name;
  std::vector<CurvePoint> points;
  std::optional<PowerFit> fit;
  // How the values were obtained, e.g. "analytic" or "enumeration".
  std::string method;
};

// Least squares of ln|value| against ln n over points with n in [n_lo, n_hi].
PowerFit fit_power_law(const ScalingCurve& curve, double n_lo, double n_hi);
// Same fit applied to a named parameter instead of the value.
PowerFit fit_power_law(const ScalingCurve& curve, const std::string& param, double n_lo, double n_hi);

enum class BandDistribution { uniform, fixed_extremes };

struct BandwidthTrial {
  double heat_capacity = 0.0;
  double ratio = 0.0;
  double p_ground = 0.0;
  bool bracket_ok = true;
};

struct BandwidthStudy {
  int n_spins = 0;
  double delta = 0.0;
  double clean_heat_capacity = 0.0;
  double p_lower = 0.0;
  double p_upper = 0.0;
  std::vector<BandwidthTrial> trials;
  double min_ratio = 0.0;
  double mean_ratio = 0.0;
  bool bracket_holds = true;
  ScalingCurve curve;
};

// Ground at -ln d and d = 2^N - 1 excited states spread over [-delta, delta]
// instead of sitting at 0.
BandwidthStudy bandwidth_perturbation_study(int n_spins, double delta, int trials, std::uint64_t seed,
                                            BandDistribution dist = BandDistribution::uniform);

struct AsymmetryResult {
  double heat_capacity = 0.0;
  double clean_heat_capacity = 0.0;
  // Spread of the hub-down level, 2 sum |dev_i|.
  double flat_bandwidth = 0.0;
  double measured_bandwidth = 0.0;
};

// Star with leaf field b + dev_i/2 and hub-leaf coupling b - dev_i/2.
SpinHamiltonian build_noisy_star(const StarParams& star, const std::vector<double>& deviations);
AsymmetryResult coupling_asymmetry_study(const StarParams& star, const std::vector<double>& deviations,
                                         double beta = 1.0, int threads = 0);

enum class ScalingProtocol { star_unconstrained, star_constrained, star_chain_m3 };

std::string to_string(ScalingProtocol p);
ScalingProtocol scaling_protocol_from_string(const std::string& s);

struct ScalingOptions {
  // Zero keeps the protocol default (6000, 12000 and 6000 steps).
  int steps = 0;
  double beta = 1.0;
  double fit_lo = 10.0;
  double fit_hi = 50.0;
  HubBoundary chain_boundary = HubBoundary::open;
  int threads = 0;
};

// Per-N tied optimizations following the published initializations; curves
// "c", "a", "b" and, for the chain, "j". Each curve carries the per-N optima
// in its points' params.
std::map<std::string, ScalingCurve> parameter_scaling_study(ScalingProtocol protocol,
                                                            const std::vector<int>& n_values,
                                                            const ScalingOptions& opt = {});
OptimizerConfig protocol_config(ScalingProtocol protocol, int n_spins, int steps_override = 0);

// Best C of a closed-form family: coarse grid seeds followed by ADAM polish.
ModelCurvePoint analytic_family_optimum(const TiedModel& model, double beta = 1.0);

// C_max(N) for the degenerate bound, Star, Star-chain m=3, 1D Ising,
// all-to-all, k-SAT reference and the non-interacting line.
std::map<std::string, ScalingCurve> comparison_curves(const std::vector<int>& n_values, double beta = 1.0,
                                                     int threads = 0);

}  // namespace spinthermo
