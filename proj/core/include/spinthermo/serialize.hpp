#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinthermo/analysis.hpp"
#include "spinthermo/hamiltonian.hpp"
#include "spinthermo/models.hpp"
#include "spinthermo/optimizer.hpp"
#include "spinthermo/spectrum.hpp"

namespace spinthermo {

using Json = nlohmann::ordered_json;

// Throws ValidationError on any key outside `allowed`.
void require_known_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& where);

// [[E, deg], ...] with the ground level at 0.
Json spectrum_to_json(const Spectrum& s);
Spectrum spectrum_from_json(const Json& j);

enum class ModelKind { star, star_chain, ising_1d, all_to_all, generic };
std::string to_string(ModelKind k);

// A parsed model file.
struct ModelSpec {
  ModelKind kind = ModelKind::generic;
  int n_spins = 0;
  double a = 0.0, b = 0.0, h = 0.0, j = 0.0;
  int n_units = 0;
  int leaves_per_unit = 0;
  HubBoundary boundary = HubBoundary::periodic;
  std::optional<SpinHamiltonian> generic;

  SpinHamiltonian hamiltonian() const;
  // Closed-form statistics where the family has one.
  std::optional<ThermalStats> analytic_stats(double beta) const;
  bool has_analytic() const { return kind != ModelKind::generic; }
};

ModelSpec model_from_json(const Json& j);
Json model_to_json(const ModelSpec& m);
ModelSpec load_model_file(const std::string& path);

// Generic form: {"model":"generic","n_spins":N,"h":[...],"J":[[i,j,v],...]}.
Json hamiltonian_to_json(const SpinHamiltonian& hm);
SpinHamiltonian hamiltonian_from_json(const Json& j);

Json thermal_stats_to_json(const ThermalStats& s);

Json optimizer_config_to_json(const OptimizerConfig& c);
OptimizerConfig optimizer_config_from_json(const Json& j);
Json optimization_run_to_json(const OptimizationRun& r);

Json curve_to_json(const ScalingCurve& c);

// Shortest decimal that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& s);

// Columns n,value,param:<name>...; LF line endings.
void write_curve_csv(std::ostream& os, const ScalingCurve& c);
ScalingCurve read_curve_csv(std::istream& is, const std::string& name = "");
void write_curve_csv_file(const std::string& path, const ScalingCurve& c);
ScalingCurve read_curve_csv_file(const std::string& path);

}  // namespace spinthermo
