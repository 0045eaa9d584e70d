#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spinthermo/hamiltonian.hpp"
#include "spinthermo/models.hpp"

namespace spinthermo {

struct FixedSchedule {};

// Triangle between lr_min and lr_max with `up_steps` per half cycle; with
// halving, cycle k (from 1) peaks at lr_min + (lr_max - lr_min) / 2^{k-1}.
struct CyclicSchedule {
  double lr_min = 1e-3;
  double lr_max = 1e-1;
  int up_steps = 6000;
  bool halve_each_cycle = false;
};

using Schedule = std::variant<FixedSchedule, CyclicSchedule>;

double cyclic_lr(long long step, const CyclicSchedule& s);

struct UniformInit {
  double lo = -1.0;
  double hi = 0.0;
};
struct ExplicitInit {
  std::vector<double> theta;
};
struct WarmStart {};

using Initialization = std::variant<UniformInit, ExplicitInit, WarmStart>;

struct OptimizerConfig {
  int steps = 60000;
  double learning_rate = 1e-3;
  Schedule schedule = FixedSchedule{};
  Initialization init = UniformInit{};
  std::uint64_t seed = 0;
  int restarts = 1;
  std::optional<double> bound_c;
  // Optional per-restart learning rates; restart r uses entry r.
  std::vector<double> restart_learning_rates;
  int threads = 0;

  void validate() const;
};

// Free parameters theta and their mapping onto a Hamiltonian.
class ParameterSpace {
 public:
  virtual ~ParameterSpace() = default;
  virtual std::string kind() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<std::string> names() const = 0;
  virtual int n_spins() const = 0;
  // C(theta) and, if grad is non-null, dC/dtheta.
  virtual double evaluate(const std::vector<double>& theta, double beta, std::vector<double>* grad,
                          int threads) const = 0;
  // Rendered Hamiltonian; nullopt when the family exceeds the spin cap.
  virtual std::optional<SpinHamiltonian> render(const std::vector<double>& theta) const = 0;
};

// theta = fields followed by the couplings of every topology edge.
class DirectSpace : public ParameterSpace {
 public:
  explicit DirectSpace(Topology topology);
  std::string kind() const override { return "direct"; }
  std::size_t dimension() const override;
  std::vector<std::string> names() const override;
  int n_spins() const override { return topology_.n_spins(); }
  double evaluate(const std::vector<double>& theta, double beta, std::vector<double>* grad,
                  int threads) const override;
  std::optional<SpinHamiltonian> render(const std::vector<double>& theta) const override;
  const Topology& topology() const { return topology_; }

 private:
  Topology topology_;
};

// h_i = c tanh(x_i), J_ij = c tanh(y_ij).
class BoundedSpace : public ParameterSpace {
 public:
  BoundedSpace(Topology topology, double c);
  std::string kind() const override { return "bounded"; }
  std::size_t dimension() const override;
  std::vector<std::string> names() const override;
  int n_spins() const override { return topology_.n_spins(); }
  double evaluate(const std::vector<double>& theta, double beta, std::vector<double>* grad,
                  int threads) const override;
  std::optional<SpinHamiltonian> render(const std::vector<double>& theta) const override;
  double bound() const { return c_; }
  const Topology& topology() const { return topology_; }

 private:
  Topology topology_;
  double c_;
};

enum class TiedFamily {
  star,         // free (a, b)
  star_tied,    // a = b (N - 3), only b free
  star_chain,   // (a, b, J)
  ising,        // (h, J)
  all_to_all,   // (h, J)
};

struct TiedModel {
  TiedFamily family = TiedFamily::star;
  int n_spins = 2;
  int leaves_per_unit = 3;
  HubBoundary boundary = HubBoundary::periodic;
};

std::string to_string(TiedFamily f);
TiedFamily tied_family_from_string(const std::string& s);

// Low-dimensional space over a closed-form family; gradients come from the
// analytic ln Z through nested dual numbers.
class TiedSpace : public ParameterSpace {
 public:
  explicit TiedSpace(TiedModel model);
  std::string kind() const override { return "tied"; }
  std::size_t dimension() const override;
  std::vector<std::string> names() const override;
  int n_spins() const override { return model_.n_spins; }
  double evaluate(const std::vector<double>& theta, double beta, std::vector<double>* grad,
                  int threads) const override;
  std::optional<SpinHamiltonian> render(const std::vector<double>& theta) const override;
  const TiedModel& model() const { return model_; }
  // Named parameters of the rendered family, e.g. {a, b} for star_tied.
  std::vector<std::pair<std::string, double>> family_params(const std::vector<double>& theta) const;

 private:
  TiedModel model_;
};

struct TrajectoryPoint {
  int step = 0;
  double c = 0.0;
  double learning_rate = 0.0;
};

struct RestartSummary {
  int index = 0;
  std::uint64_t seed = 0;
  double learning_rate = 0.0;
  double best_c = 0.0;
  bool aborted = false;
  std::string diagnostic;
};

struct OptimizationRun {
  OptimizerConfig config;
  std::uint64_t seed = 0;
  double learning_rate = 0.0;
  std::vector<std::string> param_names;
  std::vector<double> initial_theta;
  std::vector<double> best_theta;
  std::vector<double> final_theta;
  double best_c = 0.0;
  int best_step = 0;
  std::vector<TrajectoryPoint> trajectory;
  bool aborted = false;
  std::string diagnostic;
  double wall_time = 0.0;
  std::vector<RestartSummary> restarts;
};

// Single ADAM run maximizing C. `warm` seeds a WarmStart init.
OptimizationRun adam_maximize(const ParameterSpace& space, const OptimizerConfig& cfg, double beta,
                              const std::vector<double>* warm = nullptr);

// Relative spread in C under which restarts count as tied.
inline constexpr double kRestartTie = 1e-9;

// Restart r uses seed cfg.seed + r; the best C wins, ties go to the lowest seed.
OptimizationRun multi_restart(const ParameterSpace& space, const OptimizerConfig& cfg, double beta);

OptimizationRun tied_model_optimize(const TiedModel& model, const OptimizerConfig& cfg, double beta,
                                    const std::vector<double>* warm = nullptr);

// Runs the family at each N in order, each run after the first warm-started
// from its predecessor's best parameters.
std::vector<OptimizationRun> tied_model_chain(const TiedModel& model, const std::vector<int>& n_values,
                                              const OptimizerConfig& cfg, double beta);

}  // namespace spinthermo
