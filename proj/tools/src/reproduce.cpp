#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "commands.hpp"
#include "spinthermo/degenerate.hpp"
#include "spinthermo/parallel.hpp"
#include "spinthermo/structure.hpp"

namespace spinthermo::cli {
namespace {

const double kLn2Sq4 = std::numbers::ln2 * std::numbers::ln2 / 4.0;

std::vector<int> range(int lo, int hi, int step = 1) {
  std::vector<int> v;
  for (int n = lo; n <= hi; n += step) v.push_back(n);
  return v;
}

std::vector<int> capped(std::vector<int> v, int n_max) {
  if (n_max <= 0) return v;
  std::erase_if(v, [&](int n) { return n > n_max; });
  return v;
}

bool is_desk(const ReproduceRequest& r) { return r.scale == "desk"; }

struct Emitter {
  const ReproduceRequest& req;
  Archive& archive;
  Json curves = Json::array();
  Json files = Json::array();

  void emit(const ScalingCurve& c, const Json& columns, const Json& protocol) {
    if (c.points.empty()) return;
    Json prov{{"curve", c.name},       {"target", req.target}, {"scale", req.scale},
              {"method", c.method},    {"columns", columns},   {"protocol", protocol}};
    files.push_back(archive.write_curve(c, prov));
    curves.push_back(curve_to_json(c));
  }
};

Json scaling_protocol_json(ScalingProtocol p, int steps_override) {
  auto cfg = protocol_config(p, 4, steps_override);
  Json j = optimizer_config_to_json(cfg);
  if (p == ScalingProtocol::star_unconstrained) j["tie"] = "a = b (N - 3)";
  if (p == ScalingProtocol::star_chain_m3) j["warm_start"] = "previous N optimum";
  return j;
}

void table1(const ReproduceRequest& req, Emitter& em, int threads) {
  const auto ns = capped(is_desk(req) ? range(4, 24, 4) : range(4, 48, 4), req.n_max);
  ScalingCurve ksat{"ksat", {}, std::nullopt, "closed form"};
  ScalingCurve star{"star", {}, std::nullopt, "analytic ln Z + ADAM"};
  ScalingCurve chain{"star_chain_m3", {}, std::nullopt, "analytic ln Z + ADAM"};
  std::vector<ModelCurvePoint> star_pts(ns.size()), chain_pts(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) {
    star_pts[i] = analytic_family_optimum({TiedFamily::star, ns[i]}, req.beta);
    chain_pts[i] = analytic_family_optimum({TiedFamily::star_chain, ns[i], 3, HubBoundary::open}, req.beta);
  });
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double N = ns[i];
    const double asym_ksat = kLn2Sq4 * N * N / 4.0;
    const double c_ksat = ksat_reference_curve(ns[i]);
    ksat.points.push_back({N, c_ksat,
                           {{"first_excited_degeneracy", std::ldexp(1.0, ns[i] / 2) - 1.0},
                            {"asymptotic_c", asym_ksat},
                            {"ratio", c_ksat / asym_ksat}}});
    const double asym_star = kLn2Sq4 * (N - 1) * (N - 1);
    auto sp = star_pts[i].params;
    sp["first_excited_degeneracy"] = std::ldexp(1.0, ns[i] - 1) + N - 1;
    sp["asymptotic_c"] = asym_star;
    sp["ratio"] = star_pts[i].c_max / asym_star;
    star.points.push_back({N, star_pts[i].c_max, sp});
    const double mN = 3.0 * N / 4.0;
    const double asym_chain = kLn2Sq4 * mN * mN;
    auto cp = chain_pts[i].params;
    cp["first_excited_degeneracy"] = std::ldexp(1.0, int(mN)) + mN;
    cp["asymptotic_c"] = asym_chain;
    cp["ratio"] = chain_pts[i].c_max / asym_chain;
    chain.points.push_back({N, chain_pts[i].c_max, cp});
  }
  const Json cols{{"value", "maximal C at beta"},
                  {"param:first_excited_degeneracy", "closed form"},
                  {"param:asymptotic_c", "closed form"},
                  {"param:ratio", "value / asymptotic_c"}};
  Json opt_cols = cols;
  opt_cols["param:a"] = opt_cols["param:b"] = opt_cols["param:j"] = "maximizer from ADAM on analytic ln Z";
  em.emit(ksat, cols, {{"reference", "c_opt(2^(N/2))"}});
  em.emit(star, opt_cols, {{"family", "star, free (a, b)"}, {"search", "grid seeds + ADAM polish"}});
  em.emit(chain, opt_cols,
          {{"family", "star-chain m=3, open hub chain"}, {"search", "grid seeds + ADAM polish"}});
}

void scaling_tables(const ReproduceRequest& req, Emitter& em, int threads, std::vector<int> star_ns,
                    std::vector<int> chain_ns, int chain_from) {
  ScalingOptions opt;
  opt.beta = req.beta;
  opt.steps = req.steps;
  opt.threads = threads;
  for (auto p : {ScalingProtocol::star_unconstrained, ScalingProtocol::star_constrained,
                 ScalingProtocol::star_chain_m3}) {
    const bool chain = p == ScalingProtocol::star_chain_m3;
    const auto& ns = chain ? chain_ns : star_ns;
    if (ns.empty()) continue;
    auto curves = parameter_scaling_study(p, ns, opt);
    for (auto& [key, c] : curves) {
      std::erase_if(c.points, [&](const CurvePoint& pt) { return pt.n < (chain ? chain_from : star_ns.front()); });
      c.fit.reset();
      Json cols{{"value", key == "c" ? "C at the optimum" : "optimal " + key},
                {"param:*", "optimum of the same run"}};
      em.emit(c, cols, scaling_protocol_json(p, req.steps));
    }
  }
}

void fig_comparison(const ReproduceRequest& req, Emitter& em, int threads, const std::vector<std::string>& keep) {
  const auto ns = capped(is_desk(req) ? range(2, 24) : range(2, 50), req.n_max);
  auto curves = comparison_curves(ns, req.beta, threads);
  for (const auto& [key, c] : curves) {
    if (!keep.empty() && std::find(keep.begin(), keep.end(), key) == keep.end()) continue;
    Json cols{{"value", "maximal C"}, {"param:*", "maximizer"}};
    em.emit(c, cols, {{"family", key}, {"beta", req.beta}});
  }
}

void fig7(const ReproduceRequest& req, Emitter& em, int threads) {
  const int hi = is_desk(req) ? 24 : 50;
  ScalingOptions opt;
  opt.beta = req.beta;
  opt.steps = req.steps;
  opt.threads = threads;
  for (auto p : {ScalingProtocol::star_unconstrained, ScalingProtocol::star_constrained,
                 ScalingProtocol::star_chain_m3}) {
    const bool chain = p == ScalingProtocol::star_chain_m3;
    const auto ns = capped(chain ? range(4, hi - hi % 4, 4) : range(2, hi), req.n_max);
    if (ns.empty()) continue;
    for (auto& [key, c] : parameter_scaling_study(p, ns, opt)) {
      Json cols{{"value", key == "c" ? "C at the optimum" : "optimal " + key},
                {"param:*", "optimum of the same run"},
                {"fit", "least squares of ln|value| on ln N over [10, 50]"}};
      em.emit(c, cols, scaling_protocol_json(p, req.steps));
    }
  }
}

Json fig9(const ReproduceRequest& req, Emitter& em, int threads, std::ostream& out) {
  const auto ns = capped(is_desk(req) ? range(3, 14) : range(3, 22), req.n_max);
  const int steps = req.steps > 0 ? req.steps : (is_desk(req) ? 2000 : 60000);
  const double bound = 1.0;
  ScalingCurve curve{"bounded_c1", {}, std::nullopt, "exact enumeration + ADAM"};
  Json verdicts = Json::array();
  for (int N : ns) {
    OptimizerConfig cfg;
    cfg.steps = steps;
    cfg.init = UniformInit{-1.5, 1.5};
    cfg.seed = req.seed;
    cfg.restarts = 12;
    cfg.bound_c = bound;
    cfg.threads = threads;
    const double second = N <= 20 ? 0.03 : 0.003;
    cfg.learning_rate = 0.01;
    cfg.restart_learning_rates.assign(6, 0.01);
    cfg.restart_learning_rates.insert(cfg.restart_learning_rates.end(), 6, second);
    BoundedSpace space(Topology::complete(N), bound);
    auto run = multi_restart(space, cfg, req.beta);
    auto verdict = detect_structure(*space.render(run.best_theta));
    curve.points.push_back(
        {double(N), run.best_c, {{"c_bound", bound}, {"c_opt_ratio", run.best_c / c_opt_spins(N)}}});
    verdicts.push_back({{"n", N}, {"structure", verdict.label}, {"best_c", run.best_c}});
    out << "fig9 N=" << N << " C=" << run.best_c << " " << verdict.label << '\n';
  }
  Json proto{{"space", "bounded, complete graph"},
             {"bound_c", bound},
             {"steps", steps},
             {"restarts", 12},
             {"restart_learning_rates", "6 x 0.01 then 6 x 0.03 (0.003 for N > 20)"},
             {"init", "uniform(-1.5, 1.5)"},
             {"seed", req.seed}};
  em.emit(curve,
          {{"value", "best C over restarts"}, {"param:c_bound", "input"}, {"param:c_opt_ratio", "value / c_opt(2^N)"}},
          proto);
  return verdicts;
}

}  // namespace

ReproduceRequest reproduce_request_from_json(const Json& j) {
  require_known_keys(j, {"schema_version", "command", "name", "target", "scale", "beta", "seed", "n_max", "steps"},
                     "reproduce config");
  ReproduceRequest r;
  try {
    r.target = j.at("target").get<std::string>();
    r.scale = j.value("scale", r.scale);
    r.beta = j.value("beta", r.beta);
    r.seed = j.value("seed", r.seed);
    r.n_max = j.value("n_max", r.n_max);
    r.steps = j.value("steps", r.steps);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("reproduce config: ") + e.what());
  }
  if (std::find(std::begin(kReproduceTargets), std::end(kReproduceTargets), r.target) == std::end(kReproduceTargets))
    throw ValidationError("unknown reproduce target '" + r.target + "'");
  if (r.scale != "desk" && r.scale != "full") throw ValidationError("scale must be desk or full");
  if (!(r.beta > 0.0) || !std::isfinite(r.beta)) throw ValidationError("beta must be positive");
  if (r.n_max < 0 || r.steps < 0) throw ValidationError("n_max and steps must be non-negative");
  return r;
}

Json reproduce_request_to_json(const ReproduceRequest& r) {
  Json j{{"schema_version", kSchemaVersion}, {"command", "reproduce"}, {"name", r.target + "-" + r.scale},
         {"target", r.target},               {"scale", r.scale},        {"beta", r.beta},
         {"seed", r.seed}};
  if (r.n_max > 0) j["n_max"] = r.n_max;
  if (r.steps > 0) j["steps"] = r.steps;
  return j;
}

Json run_reproduce(const ReproduceRequest& r, Archive& archive, int threads, std::ostream& out) {
  Emitter em{r, archive};
  Json extra;
  const int table_hi = r.n_max > 0 ? r.n_max : 24;
  if (r.target == "table1") {
    table1(r, em, threads);
  } else if (r.target == "table2") {
    scaling_tables(r, em, threads, range(2, std::min(24, table_hi)), range(4, std::min(24, table_hi), 4), 4);
  } else if (r.target == "table3") {
    const int hi = r.n_max > 0 ? std::min(50, r.n_max) : 50;
    scaling_tables(r, em, threads, range(25, hi), range(4, std::min(48, hi), 4), 28);
  } else if (r.target == "fig1") {
    fig_comparison(r, em, threads, {"c_opt", "star", "ising_1d", "non_interacting"});
  } else if (r.target == "fig6") {
    fig_comparison(r, em, threads, {});
  } else if (r.target == "fig7") {
    fig7(r, em, threads);
  } else if (r.target == "fig9") {
    extra["structures"] = fig9(r, em, threads, out);
  }
  Json result{{"schema_version", kSchemaVersion}, {"command", "reproduce"}, {"target", r.target},
              {"scale", r.scale},                 {"files", em.files},       {"curves", em.curves}};
  for (auto& [k, v] : extra.items()) result[k] = v;
  return result;
}

std::string reproduce_help() {
  return "Targets and desk-scale defaults (--scale full lifts the caps):\n"
         "  table1  K-SAT reference, Star and Star-chain m=3 optima, N = 4..24 step 4 (full: ..48)\n"
         "  table2  Star rows N = 2..24, Star-chain m=3 rows N = 4..24 step 4 (same at both scales)\n"
         "  table3  Star rows N = 25..50, Star-chain rows N = 28..48 step 4 (same at both scales)\n"
         "  fig1    c_opt, Star, 1D Ising, non-interacting line for N = 2..24 (full: ..50)\n"
         "  fig6    all comparison curves for N = 2..24 (full: ..50)\n"
         "  fig7    parameter scaling of the three tied protocols, N <= 24 (full: <= 50)\n"
         "  fig9    bounded optimization, c = 1.0, N = 3..14, 12 restarts x 2000 steps\n"
         "          (full: N = 3..22, 60000 steps; hours to days)\n"
         "--n-max and --steps truncate further.\n";
}

}  // namespace spinthermo::cli
