#include "spinthermo/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "spinthermo/analytic.hpp"
#include "spinthermo/dual.hpp"
#include "spinthermo/enumerate.hpp"
#include "spinthermo/error.hpp"
#include "spinthermo/parallel.hpp"

namespace spinthermo {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

std::vector<std::string> direct_names(const Topology& t, const std::string& prefix_h,
                                      const std::string& prefix_j) {
  std::vector<std::string> out;
  for (int i = 0; i < t.n_spins(); ++i) out.push_back(prefix_h + "[" + std::to_string(i) + "]");
  for (const auto& e : t.edges()) {
    out.push_back(prefix_j + "[" + std::to_string(e.i) + "," + std::to_string(e.j) + "]");
  }
  return out;
}

void check_theta(const std::vector<double>& theta, std::size_t dim) {
  if (theta.size() != dim) {
    std::ostringstream msg;
    msg << "parameter vector has length " << theta.size() << ", expected " << dim;
    throw ValidationError(msg.str());
  }
}

int hubs_of(const TiedModel& m) {
  if (m.leaves_per_unit < 1 || m.n_spins % (m.leaves_per_unit + 1) != 0) {
    std::ostringstream msg;
    msg << "star-chain with m = " << m.leaves_per_unit << " cannot have N = " << m.n_spins;
    throw DomainError(msg.str());
  }
  return m.n_spins / (m.leaves_per_unit + 1);
}

template <class S>
S tied_heat_capacity(const TiedModel& m, const std::vector<S>& th, double beta) {
  const long long N = m.n_spins;
  switch (m.family) {
    case TiedFamily::star:
      return analytic::star_heat_capacity<S>(N, th[0], th[1], beta);
    case TiedFamily::star_tied:
      return analytic::star_heat_capacity<S>(N, th[0] * S(double(N - 3)), th[0], beta);
    case TiedFamily::star_chain: {
      const long long n = hubs_of(m), leaves = m.leaves_per_unit;
      return analytic::heat_capacity_from_log_z<S>(
          [&](const auto& B) {
            using D = std::remove_cvref_t<decltype(B)>;
            return analytic::star_chain_log_z<D>(n, leaves, D(th[0]), D(th[1]), D(th[2]), B, m.boundary);
          },
          beta);
    }
    case TiedFamily::ising:
      return analytic::heat_capacity_from_log_z<S>(
          [&](const auto& B) {
            using D = std::remove_cvref_t<decltype(B)>;
            return analytic::ising_1d_log_z<D>(N, D(th[0]), D(th[1]), B);
          },
          beta);
    case TiedFamily::all_to_all:
      return analytic::heat_capacity_from_log_z<S>(
          [&](const auto& B) {
            using D = std::remove_cvref_t<decltype(B)>;
            return analytic::all_to_all_log_z<D>(N, D(th[0]), D(th[1]), B);
          },
          beta);
  }
  throw DomainError("unknown tied family");
}

std::vector<double> draw_init(const OptimizerConfig& cfg, std::size_t dim, std::uint64_t seed,
                              const std::vector<double>* warm) {
  return std::visit(
      [&](const auto& init) -> std::vector<double> {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, UniformInit>) {
          std::mt19937_64 rng(seed);
          std::uniform_real_distribution<double> dist(init.lo, init.hi);
          std::vector<double> th(dim);
          for (auto& x : th) x = dist(rng);
          return th;
        } else if constexpr (std::is_same_v<T, ExplicitInit>) {
          check_theta(init.theta, dim);
          return init.theta;
        } else {
          if (!warm) throw ValidationError("warm-start initialization needs a previous optimum");
          check_theta(*warm, dim);
          return *warm;
        }
      },
      cfg.init);
}

double schedule_lr(const OptimizerConfig& cfg, double base, int step) {
  if (const auto* c = std::get_if<CyclicSchedule>(&cfg.schedule)) return cyclic_lr(step, *c);
  return base;
}

}  // namespace

double cyclic_lr(long long step, const CyclicSchedule& s) {
  if (s.up_steps < 1) throw DomainError("cyclic schedule needs up_steps >= 1");
  const double up = s.up_steps;
  const double cycle = std::floor(1.0 + step / (2.0 * up));
  const double x = std::abs(step / up - 2.0 * cycle + 1.0);
  const double scale = s.halve_each_cycle ? 1.0 / std::exp2(cycle - 1.0) : 1.0;
  return s.lr_min + (s.lr_max - s.lr_min) * std::max(0.0, 1.0 - x) * scale;
}

void OptimizerConfig::validate() const {
  if (steps < 0) throw ValidationError("steps must be >= 0");
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (const auto* c = std::get_if<CyclicSchedule>(&schedule)) {
    if (!(c->lr_min < c->lr_max) || !(c->lr_min >= 0.0)) {
      throw ValidationError("cyclic schedule needs 0 <= lr_min < lr_max");
    }
    if (c->up_steps < 1) throw ValidationError("cyclic schedule needs up_steps >= 1");
  }
  if (const auto* u = std::get_if<UniformInit>(&init)) {
    if (!(u->lo <= u->hi)) throw ValidationError("uniform init needs lo <= hi");
  }
  if (bound_c && !(*bound_c > 0.0)) throw ValidationError("bound c must be positive");
  if (!restart_learning_rates.empty() &&
      restart_learning_rates.size() != static_cast<std::size_t>(restarts)) {
    throw ValidationError("restart_learning_rates must list one rate per restart");
  }
  for (double lr : restart_learning_rates)
    if (!(lr > 0.0)) throw ValidationError("restart learning rates must be positive");
}

DirectSpace::DirectSpace(Topology topology) : topology_(std::move(topology)) {}

std::size_t DirectSpace::dimension() const { return topology_.n_spins() + topology_.size(); }

std::vector<std::string> DirectSpace::names() const { return direct_names(topology_, "h", "J"); }

std::optional<SpinHamiltonian> DirectSpace::render(const std::vector<double>& theta) const {
  check_theta(theta, dimension());
  std::vector<double> h(theta.begin(), theta.begin() + topology_.n_spins());
  std::vector<double> J(theta.begin() + topology_.n_spins(), theta.end());
  return SpinHamiltonian(topology_, std::move(h), std::move(J));
}

double DirectSpace::evaluate(const std::vector<double>& theta, double beta, std::vector<double>* grad,
                             int threads) const {
  auto hm = *render(theta);
  if (!grad) return enumerate_stats(hm, beta, threads).heat_capacity;
  auto [st, g] = enumerate_gradient(hm, beta, threads);
  *grad = g.flat();
  return st.heat_capacity;
}

BoundedSpace::BoundedSpace(Topology topology, double c) : topology_(std::move(topology)), c_(c) {
  if (!(c > 0.0)) throw DomainError("parameter bound must be positive");
}

std::size_t BoundedSpace::dimension() const { return topology_.n_spins() + topology_.size(); }

std::vector<std::string> BoundedSpace::names() const { return direct_names(topology_, "x", "y"); }

std::optional<SpinHamiltonian> BoundedSpace::render(const std::vector<double>& theta) const {
  check_theta(theta, dimension());
  std::vector<double> p(theta.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = c_ * std::tanh(theta[k]);
  std::vector<double> h(p.begin(), p.begin() + topology_.n_spins());
  std::vector<double> J(p.begin() + topology_.n_spins(), p.end());
  return SpinHamiltonian(topology_, std::move(h), std::move(J));
}

double BoundedSpace::evaluate(const std::vector<double>& theta, double beta, std::vector<double>* grad,
                              int threads) const {
  auto hm = *render(theta);
  if (!grad) return enumerate_stats(hm, beta, threads).heat_capacity;
  auto [st, g] = enumerate_gradient(hm, beta, threads);
  *grad = g.flat();
  for (std::size_t k = 0; k < grad->size(); ++k) {
    const double t = std::tanh(theta[k]);
    (*grad)[k] *= c_ * (1.0 - t * t);
  }
  return st.heat_capacity;
}

std::string to_string(TiedFamily f) {
  switch (f) {
    case TiedFamily::star: return "star";
    case TiedFamily::star_tied: return "star_tied";
    case TiedFamily::star_chain: return "star_chain";
    case TiedFamily::ising: return "ising_1d";
    case TiedFamily::all_to_all: return "all_to_all";
  }
  return "unknown";
}

TiedFamily tied_family_from_string(const std::string& s) {
  if (s == "star") return TiedFamily::star;
  if (s == "star_tied") return TiedFamily::star_tied;
  if (s == "star_chain") return TiedFamily::star_chain;
  if (s == "ising_1d") return TiedFamily::ising;
  if (s == "all_to_all") return TiedFamily::all_to_all;
  throw ValidationError("unknown tied family '" + s + "'");
}

TiedSpace::TiedSpace(TiedModel model) : model_(model) {
  switch (model_.family) {
    case TiedFamily::star:
      if (model_.n_spins < 2) throw DomainError("star needs N >= 2");
      break;
    case TiedFamily::star_tied:
      if (model_.n_spins < 2) throw DomainError("tied star needs N >= 2");
      break;
    case TiedFamily::star_chain:
      hubs_of(model_);
      break;
    case TiedFamily::ising:
      if (model_.n_spins < 3) throw DomainError("periodic Ising chain needs N >= 3");
      break;
    case TiedFamily::all_to_all:
      if (model_.n_spins < 2) throw DomainError("all-to-all needs N >= 2");
      break;
  }
}

std::size_t TiedSpace::dimension() const { return names().size(); }

std::vector<std::string> TiedSpace::names() const {
  switch (model_.family) {
    case TiedFamily::star: return {"a", "b"};
    case TiedFamily::star_tied: return {"b"};
    case TiedFamily::star_chain: return {"a", "b", "j"};
    case TiedFamily::ising:
    case TiedFamily::all_to_all: return {"h", "j"};
  }
  return {};
}

std::vector<std::pair<std::string, double>> TiedSpace::family_params(const std::vector<double>& theta) const {
  check_theta(theta, dimension());
  if (model_.family == TiedFamily::star_tied) {
    return {{"a", theta[0] * (model_.n_spins - 3)}, {"b", theta[0]}};
  }
  std::vector<std::pair<std::string, double>> out;
  auto n = names();
  for (std::size_t k = 0; k < n.size(); ++k) out.emplace_back(n[k], theta[k]);
  return out;
}

double TiedSpace::evaluate(const std::vector<double>& theta, double beta, std::vector<double>* grad,
                           int /*threads*/) const {
  check_theta(theta, dimension());
  if (!grad) return tied_heat_capacity<double>(model_, theta, beta);
  using D = ad::Dual<double>;
  grad->assign(theta.size(), 0.0);
  double value = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    std::vector<D> th(theta.size());
    for (std::size_t q = 0; q < theta.size(); ++q) th[q] = D{theta[q], q == k ? 1.0 : 0.0};
    D c = tied_heat_capacity<D>(model_, th, beta);
    value = c.v;
    (*grad)[k] = c.d;
  }
  return value;
}

std::optional<SpinHamiltonian> TiedSpace::render(const std::vector<double>& theta) const {
  check_theta(theta, dimension());
  if (model_.n_spins > kMaxSpins) return std::nullopt;
  switch (model_.family) {
    case TiedFamily::star:
      return build_star({model_.n_spins, theta[0], theta[1]});
    case TiedFamily::star_tied:
      return build_star({model_.n_spins, theta[0] * (model_.n_spins - 3), theta[0]});
    case TiedFamily::star_chain: {
      StarChainParams p{hubs_of(model_), model_.leaves_per_unit, theta[0], theta[1], theta[2], model_.boundary};
      return build_star_chain(p);
    }
    case TiedFamily::ising:
      return build_ising_1d(theta[0], theta[1], model_.n_spins);
    case TiedFamily::all_to_all:
      return build_all_to_all(theta[0], theta[1], model_.n_spins);
  }
  return std::nullopt;
}

OptimizationRun adam_maximize(const ParameterSpace& space, const OptimizerConfig& cfg, double beta,
                              const std::vector<double>* warm) {
  cfg.validate();
  if (!(beta > 0.0)) throw DomainError("inverse temperature must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t dim = space.dimension();

  OptimizationRun run;
  run.config = cfg;
  run.seed = cfg.seed;
  run.learning_rate = cfg.learning_rate;
  run.param_names = space.names();
  std::vector<double> theta = draw_init(cfg, dim, cfg.seed, warm);
  run.initial_theta = theta;
  run.best_theta = theta;
  run.best_c = -1.0;

  std::vector<double> m(dim, 0.0), v(dim, 0.0), g(dim, 0.0);
  const int stride = std::max(1, (cfg.steps + 999) / 1000);
  double b1t = 1.0, b2t = 1.0;
  for (int it = 0; it <= cfg.steps; ++it) {
    double c = space.evaluate(theta, beta, &g, cfg.threads);
    bool finite = std::isfinite(c);
    for (double x : g) finite = finite && std::isfinite(x);
    if (!finite) {
      std::ostringstream msg;
      msg << "non-finite heat capacity or gradient at step " << it;
      run.aborted = true;
      run.diagnostic = msg.str();
      break;
    }
    const double lr = schedule_lr(cfg, cfg.learning_rate, it);
    if (c > run.best_c) {
      run.best_c = c;
      run.best_theta = theta;
      run.best_step = it;
    }
    if (it % stride == 0 || it == cfg.steps) run.trajectory.push_back({it, c, lr});
    if (it == cfg.steps) break;
    b1t *= kAdamBeta1;
    b2t *= kAdamBeta2;
    for (std::size_t k = 0; k < dim; ++k) {
      const double gl = -g[k];
      m[k] = kAdamBeta1 * m[k] + (1.0 - kAdamBeta1) * gl;
      v[k] = kAdamBeta2 * v[k] + (1.0 - kAdamBeta2) * gl * gl;
      const double mh = m[k] / (1.0 - b1t);
      const double vh = v[k] / (1.0 - b2t);
      theta[k] -= lr * mh / (std::sqrt(vh) + kAdamEps);
    }
  }
  run.final_theta = theta;
  run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run.restarts.push_back({0, run.seed, run.learning_rate, run.best_c, run.aborted, run.diagnostic});
  return run;
}

OptimizationRun multi_restart(const ParameterSpace& space, const OptimizerConfig& cfg, double beta) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int R = cfg.restarts;
  std::vector<OptimizationRun> runs(R);
  const int outer = std::min(resolve_threads(cfg.threads), R);
  parallel_for(R, outer, [&](std::size_t r) {
    OptimizerConfig sub = cfg;
    sub.restarts = 1;
    sub.restart_learning_rates.clear();
    sub.seed = cfg.seed + r;
    if (!cfg.restart_learning_rates.empty()) sub.learning_rate = cfg.restart_learning_rates[r];
    if (outer > 1) sub.threads = 1;
    runs[r] = adam_maximize(space, sub, beta);
  });
  auto usable = [&](int r) { return !(runs[r].aborted && runs[r].best_c < 0.0); };
  double top = -1.0;
  for (int r = 0; r < R; ++r)
    if (usable(r)) top = std::max(top, runs[r].best_c);
  // Restarts within kRestartTie of the best are equally good; the lowest seed wins.
  int best = -1;
  for (int r = 0; r < R && best < 0; ++r)
    if (usable(r) && runs[r].best_c >= top - kRestartTie * std::abs(top)) best = r;
  if (best < 0) {
    std::ostringstream msg;
    msg << "all " << R << " restarts aborted; first diagnostic: " << runs[0].diagnostic;
    throw NumericalError(msg.str());
  }
  OptimizationRun out = runs[best];
  out.config = cfg;
  out.restarts.clear();
  for (int r = 0; r < R; ++r) {
    out.restarts.push_back({r, runs[r].seed, runs[r].learning_rate, runs[r].best_c, runs[r].aborted,
                            runs[r].diagnostic});
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

OptimizationRun tied_model_optimize(const TiedModel& model, const OptimizerConfig& cfg, double beta,
                                    const std::vector<double>* warm) {
  TiedSpace space(model);
  if (cfg.restarts == 1) return adam_maximize(space, cfg, beta, warm);
  return multi_restart(space, cfg, beta);
}

std::vector<OptimizationRun> tied_model_chain(const TiedModel& model, const std::vector<int>& n_values,
                                              const OptimizerConfig& cfg, double beta) {
  std::vector<OptimizationRun> out;
  OptimizerConfig step_cfg = cfg;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    TiedModel m = model;
    m.n_spins = n_values[i];
    if (i == 0) {
      out.push_back(tied_model_optimize(m, cfg, beta));
    } else {
      step_cfg.init = WarmStart{};
      out.push_back(tied_model_optimize(m, step_cfg, beta, &out.back().best_theta));
    }
  }
  return out;
}

}  // namespace spinthermo
