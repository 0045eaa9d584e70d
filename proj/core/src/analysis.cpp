#include "spinthermo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "spinthermo/degenerate.hpp"
#include "spinthermo/enumerate.hpp"
#include "spinthermo/error.hpp"
#include "spinthermo/parallel.hpp"

namespace spinthermo {
namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

PowerFit fit_points(const std::vector<std::pair<double, double>>& pts, double n_lo, double n_hi) {
  std::vector<double> x, y;
  for (const auto& [n, v] : pts) {
    if (n < n_lo || n > n_hi || v == 0.0 || !std::isfinite(v)) continue;
    x.push_back(std::log(n));
    y.push_back(std::log(std::abs(v)));
  }
  if (x.size() < 2) throw DomainError("power-law fit needs at least two points in the window");
  const double k = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  PowerFit f;
  f.exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double intercept = (sy - f.exponent * sx) / k;
  f.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - intercept - f.exponent * x[i];
    ss += r * r;
  }
  f.residual = std::sqrt(ss / k);
  f.n_lo = n_lo;
  f.n_hi = n_hi;
  f.points = static_cast<int>(x.size());
  return f;
}

OptimizerConfig polish_config(const std::vector<double>& init, double lr, int steps) {
  OptimizerConfig cfg;
  cfg.steps = steps;
  cfg.learning_rate = lr;
  cfg.init = ExplicitInit{init};
  cfg.threads = 1;
  return cfg;
}

std::vector<std::vector<double>> grid_seeds(const TiedModel& model) {
  std::vector<std::vector<double>> seeds;
  const int N = model.n_spins;
  auto lin = [](double lo, double hi, int k) {
    std::vector<double> v;
    for (int i = 0; i < k; ++i) v.push_back(lo + (hi - lo) * i / (k - 1));
    return v;
  };
  switch (model.family) {
    case TiedFamily::star:
      for (double b : lin(0.25, 0.25 + 0.2 * N, 9))
        for (double r : lin(-1.0, double(N), 12)) seeds.push_back({r * b, b});
      break;
    case TiedFamily::star_tied:
      for (double b : lin(0.05, 0.25 + 0.2 * N, 40)) seeds.push_back({b});
      break;
    case TiedFamily::star_chain:
      for (double a : lin(0.5, 8.0, 8))
        for (double b : lin(0.5, 3.0, 6))
          for (double j : lin(-6.0, 2.0, 9)) seeds.push_back({a, b, j});
      break;
    case TiedFamily::ising:
    case TiedFamily::all_to_all:
      for (double h : lin(-3.0, 3.0, 13))
        for (double j : lin(-3.0, 3.0, 13)) seeds.push_back({h, j});
      break;
  }
  return seeds;
}

}  // namespace

std::vector<Level> uniform_shift_levels(std::uint64_t d, double eps) {
  if (d < 2) throw DomainError("uniform shift needs d >= 2");
  return {{0.0, 1}, {(1.0 + eps) * std::log(static_cast<double>(d)), d}};
}

double uniform_shift_variance(std::uint64_t d, double eps) {
  if (d < 2) throw DomainError("uniform shift needs d >= 2");
  if (!(eps > -1.0)) throw DomainError("uniform shift needs eps > -1");
  const double L = std::log(static_cast<double>(d));
  const double c = std::cosh(0.5 * eps * L);
  return L * L * (1.0 + eps) * (1.0 + eps) / (4.0 * c * c);
}

PowerFit fit_power_law(const ScalingCurve& curve, double n_lo, double n_hi) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : curve.points) pts.emplace_back(p.n, p.value);
  return fit_points(pts, n_lo, n_hi);
}

PowerFit fit_power_law(const ScalingCurve& curve, const std::string& param, double n_lo, double n_hi) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : curve.points) {
    auto it = p.params.find(param);
    if (it != p.params.end()) pts.emplace_back(p.n, it->second);
  }
  return fit_points(pts, n_lo, n_hi);
}

BandwidthStudy bandwidth_perturbation_study(int n_spins, double delta, int trials, std::uint64_t seed,
                                            BandDistribution dist) {
  if (n_spins < 2 || n_spins > 24) throw DomainError("bandwidth study needs 2 <= N <= 24");
  if (!(delta >= 0.0)) throw DomainError("bandwidth must be >= 0");
  if (trials < 1) throw DomainError("bandwidth study needs at least one trial");
  const std::uint64_t d = (std::uint64_t{1} << n_spins) - 1;
  const double L = std::log(static_cast<double>(d));
  BandwidthStudy out;
  out.n_spins = n_spins;
  out.delta = delta;
  std::vector<Level> clean{{-L, 1}, {0.0, d}};
  out.clean_heat_capacity = thermal_stats(std::span<const Level>(clean), 1.0).heat_capacity;
  out.p_lower = 1.0 / (1.0 + std::exp(delta));
  out.p_upper = 1.0 / (1.0 + std::exp(-delta));
  out.trials.resize(trials);
  parallel_for(trials, 0, [&](std::size_t t) {
    auto rng = stream(seed, t);
    std::uniform_real_distribution<double> u(-delta, delta);
    std::bernoulli_distribution coin(0.5);
    std::vector<Level> levels;
    levels.reserve(d + 1);
    levels.push_back({-L, 1});
    for (std::uint64_t i = 0; i < d; ++i) {
      double e = dist == BandDistribution::uniform ? u(rng) : (coin(rng) ? delta : -delta);
      levels.push_back({e, 1});
    }
    auto st = thermal_stats(std::span<const Level>(levels), 1.0);
    auto p = gibbs_populations(std::span<const Level>(levels), 1.0);
    BandwidthTrial tr;
    tr.heat_capacity = st.heat_capacity;
    tr.ratio = st.heat_capacity / out.clean_heat_capacity;
    tr.p_ground = p[0];
    tr.bracket_ok = p[0] >= out.p_lower - 1e-12 && p[0] <= out.p_upper + 1e-12;
    out.trials[t] = tr;
  });
  out.min_ratio = out.trials[0].ratio;
  double sum = 0.0;
  out.curve.name = "bandwidth_ratio";
  out.curve.method = "spectrum";
  for (int t = 0; t < trials; ++t) {
    const auto& tr = out.trials[t];
    out.min_ratio = std::min(out.min_ratio, tr.ratio);
    sum += tr.ratio;
    out.bracket_holds = out.bracket_holds && tr.bracket_ok;
    out.curve.points.push_back({double(t), tr.ratio, {{"p_ground", tr.p_ground}}});
  }
  out.mean_ratio = sum / trials;
  return out;
}

SpinHamiltonian build_noisy_star(const StarParams& star, const std::vector<double>& dev) {
  if (static_cast<int>(dev.size()) != star.n_spins - 1) {
    throw ValidationError("coupling asymmetry needs one deviation per leaf");
  }
  auto hm = build_star(star);
  for (int i = 1; i < star.n_spins; ++i) {
    hm = hm.with_field(i, star.b + 0.5 * dev[i - 1]).with_coupling(0, i, star.b - 0.5 * dev[i - 1]);
  }
  return hm;
}

AsymmetryResult coupling_asymmetry_study(const StarParams& star, const std::vector<double>& dev,
                                         double beta, int threads) {
  if (star.n_spins > kMaxSpectrumSpins) throw SizeError("coupling asymmetry study needs N <= 26");
  const auto noisy = build_noisy_star(star, dev);
  AsymmetryResult r;
  r.heat_capacity = enumerate_stats(noisy, beta, threads).heat_capacity;
  r.clean_heat_capacity = enumerate_stats(build_star(star), beta, threads).heat_capacity;
  for (double x : dev) r.flat_bandwidth += 2.0 * std::abs(x);
  // Hub down (bit 0 clear); leaves aligned with or against their deviation.
  std::uint64_t hi = 0, lo = 0;
  for (int i = 1; i < star.n_spins; ++i) {
    if (dev[i - 1] >= 0.0) hi |= std::uint64_t{1} << i; else lo |= std::uint64_t{1} << i;
  }
  r.measured_bandwidth = noisy.energy(hi) - noisy.energy(lo);
  return r;
}

std::string to_string(ScalingProtocol p) {
  switch (p) {
    case ScalingProtocol::star_unconstrained: return "star_unconstrained";
    case ScalingProtocol::star_constrained: return "star_constrained";
    case ScalingProtocol::star_chain_m3: return "star_chain_m3";
  }
  return "unknown";
}

ScalingProtocol scaling_protocol_from_string(const std::string& s) {
  if (s == "star_unconstrained") return ScalingProtocol::star_unconstrained;
  if (s == "star_constrained") return ScalingProtocol::star_constrained;
  if (s == "star_chain_m3") return ScalingProtocol::star_chain_m3;
  throw ValidationError("unknown scaling protocol '" + s + "'");
}

OptimizerConfig protocol_config(ScalingProtocol protocol, int n_spins, int steps_override) {
  OptimizerConfig cfg;
  cfg.threads = 1;
  switch (protocol) {
    case ScalingProtocol::star_unconstrained:
      cfg.steps = 6000;
      cfg.learning_rate = 0.01;
      cfg.init = ExplicitInit{{6.0}};
      break;
    case ScalingProtocol::star_constrained:
      cfg.steps = 12000;
      cfg.learning_rate = 0.001;
      cfg.init = ExplicitInit{{2.0 * n_spins - 3.0, 2.2}};
      break;
    case ScalingProtocol::star_chain_m3:
      cfg.steps = 6000;
      cfg.learning_rate = 0.003;
      cfg.init = ExplicitInit{{3.5, 1.55, -1.6}};
      break;
  }
  if (steps_override > 0) cfg.steps = steps_override;
  return cfg;
}

std::map<std::string, ScalingCurve> parameter_scaling_study(ScalingProtocol protocol,
                                                            const std::vector<int>& n_values,
                                                            const ScalingOptions& opt) {
  if (n_values.empty()) throw DomainError("scaling study needs at least one N");
  std::vector<std::map<std::string, double>> optima(n_values.size());
  std::vector<double> cs(n_values.size());
  if (protocol == ScalingProtocol::star_chain_m3) {
    TiedModel model{TiedFamily::star_chain, n_values.front(), 3, opt.chain_boundary};
    auto runs = tied_model_chain(model, n_values, protocol_config(protocol, n_values.front(), opt.steps), opt.beta);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      optima[i] = {{"a", runs[i].best_theta[0]}, {"b", runs[i].best_theta[1]}, {"j", runs[i].best_theta[2]}};
      cs[i] = runs[i].best_c;
    }
  } else {
    parallel_for(n_values.size(), opt.threads, [&](std::size_t i) {
      const int N = n_values[i];
      TiedModel model{protocol == ScalingProtocol::star_unconstrained ? TiedFamily::star_tied : TiedFamily::star, N};
      auto run = tied_model_optimize(model, protocol_config(protocol, N, opt.steps), opt.beta);
      TiedSpace space(model);
      for (const auto& [k, v] : space.family_params(run.best_theta)) optima[i][k] = v;
      cs[i] = run.best_c;
    });
  }
  std::map<std::string, ScalingCurve> curves;
  std::vector<std::string> names{"c", "a", "b"};
  if (protocol == ScalingProtocol::star_chain_m3) names.push_back("j");
  for (const auto& name : names) {
    ScalingCurve c;
    c.name = to_string(protocol) + ":" + name;
    c.method = "analytic";
    for (std::size_t i = 0; i < n_values.size(); ++i) {
      c.points.push_back({double(n_values[i]), name == "c" ? cs[i] : optima[i].at(name), optima[i]});
    }
    try {
      c.fit = fit_power_law(c, opt.fit_lo, opt.fit_hi);
    } catch (const DomainError&) {
    }
    curves[name] = std::move(c);
  }
  return curves;
}

ModelCurvePoint analytic_family_optimum(const TiedModel& model, double beta) {
  TiedSpace space(model);
  auto seeds = grid_seeds(model);
  if (model.family == TiedFamily::star && model.n_spins >= 3) {
    auto tied = analytic_family_optimum({TiedFamily::star_tied, model.n_spins}, beta);
    seeds.push_back({tied.params.at("a"), tied.params.at("b")});
    seeds.push_back({2.0 * model.n_spins - 3.0, 2.2});
  }
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    double c = space.evaluate(seeds[s], beta, nullptr, 1);
    ranked.emplace_back(std::isfinite(c) ? c : -1.0, s);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  const std::size_t keep = std::min<std::size_t>(3, ranked.size());
  std::vector<double> best_theta;
  double best_c = -1.0;
  for (std::size_t r = 0; r < keep; ++r) {
    auto coarse = adam_maximize(space, polish_config(seeds[ranked[r].second], 0.01, 4000), beta);
    auto fine = adam_maximize(space, polish_config(coarse.best_theta, 0.001, 4000), beta);
    if (fine.best_c > best_c) {
      best_c = fine.best_c;
      best_theta = fine.best_theta;
    }
  }
  ModelCurvePoint pt;
  pt.n_spins = model.n_spins;
  pt.c_max = best_c;
  for (const auto& [k, v] : space.family_params(best_theta)) pt.params[k] = v;
  return pt;
}

std::map<std::string, ScalingCurve> comparison_curves(const std::vector<int>& n_values, double beta,
                                                     int threads) {
  std::map<std::string, ScalingCurve> curves;
  auto add = [&](const std::string& name, const std::string& method) -> ScalingCurve& {
    auto& c = curves[name];
    c.name = name;
    c.method = method;
    return c;
  };
  add("c_opt", "closed_form");
  add("star", "analytic");
  add("star_chain_m3", "analytic");
  add("ising_1d", "analytic");
  add("all_to_all", "analytic");
  add("ksat", "closed_form");
  add("non_interacting", "closed_form");
  struct Row {
    std::vector<std::pair<std::string, CurvePoint>> entries;
  };
  std::vector<Row> rows(n_values.size());
  const double single = single_spin_c_max();
  parallel_for(n_values.size(), threads, [&](std::size_t i) {
    const int N = n_values[i];
    auto& e = rows[i].entries;
    e.push_back({"c_opt", {double(N), c_opt_spins(N), {}}});
    e.push_back({"non_interacting", {double(N), single * N, {}}});
    if (N >= 4 && N % 2 == 0) e.push_back({"ksat", {double(N), ksat_reference_curve(N), {}}});
    if (N >= 2) {
      auto p = analytic_family_optimum({TiedFamily::star, N}, beta);
      e.push_back({"star", {double(N), p.c_max, p.params}});
      auto q = analytic_family_optimum({TiedFamily::all_to_all, N}, beta);
      e.push_back({"all_to_all", {double(N), q.c_max, q.params}});
    }
    if (N >= 3) {
      auto p = analytic_family_optimum({TiedFamily::ising, N}, beta);
      e.push_back({"ising_1d", {double(N), p.c_max, p.params}});
    }
    if (N >= 4 && N % 4 == 0) {
      auto p = analytic_family_optimum({TiedFamily::star_chain, N, 3, HubBoundary::open}, beta);
      e.push_back({"star_chain_m3", {double(N), p.c_max, p.params}});
    }
  });
  for (auto& row : rows)
    for (auto& [name, pt] : row.entries) curves[name].points.push_back(std::move(pt));
  return curves;
}

}  // namespace spinthermo
