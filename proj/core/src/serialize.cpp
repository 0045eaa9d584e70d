#include "spinthermo/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "spinthermo/error.hpp"

namespace spinthermo {
namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->template get<T>();
}

template <class T>
T get_req(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + ": missing key '" + key + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(where + ": bad value for '" + key + "': " + e.what());
  }
}

HubBoundary boundary_from_string(const std::string& s) {
  if (s == "periodic") return HubBoundary::periodic;
  if (s == "open") return HubBoundary::open;
  throw ValidationError("boundary must be 'periodic' or 'open', got '" + s + "'");
}

std::string boundary_name(HubBoundary b) { return b == HubBoundary::open ? "open" : "periodic"; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void require_known_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ValidationError(where + ": unknown key '" + k + "'");
    }
  }
}

Json spectrum_to_json(const Spectrum& s) {
  Json out = Json::array();
  const double e0 = s.size() ? s.ground_energy() : 0.0;
  for (const auto& l : s.levels()) out.push_back(Json::array({l.energy - e0, l.degeneracy}));
  return out;
}

Spectrum spectrum_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("spectrum: expected an array of [energy, degeneracy]");
  std::vector<Level> raw;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number_integer()) {
      throw ValidationError("spectrum: each entry must be [energy, degeneracy]");
    }
    if (e[1].get<long long>() < 1) throw ValidationError("spectrum: degeneracy must be >= 1");
    raw.push_back({e[0].get<double>(), e[1].get<std::uint64_t>()});
  }
  return Spectrum(std::move(raw));
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::star: return "star";
    case ModelKind::star_chain: return "star_chain";
    case ModelKind::ising_1d: return "ising_1d";
    case ModelKind::all_to_all: return "all_to_all";
    case ModelKind::generic: return "generic";
  }
  return "generic";
}

SpinHamiltonian ModelSpec::hamiltonian() const {
  switch (kind) {
    case ModelKind::star: return build_star({n_spins, a, b});
    case ModelKind::star_chain: return build_star_chain({n_units, leaves_per_unit, a, b, j, boundary});
    case ModelKind::ising_1d: return build_ising_1d(h, j, n_spins);
    case ModelKind::all_to_all: return build_all_to_all(h, j, n_spins);
    case ModelKind::generic: return *generic;
  }
  throw ValidationError("unknown model kind");
}

std::optional<ThermalStats> ModelSpec::analytic_stats(double beta) const {
  switch (kind) {
    case ModelKind::star: return star_stats({n_spins, a, b}, beta);
    case ModelKind::star_chain: return star_chain_stats({n_units, leaves_per_unit, a, b, j, boundary}, beta);
    case ModelKind::ising_1d: return ising_1d_stats(h, j, n_spins, beta);
    case ModelKind::all_to_all: return all_to_all_stats(h, j, n_spins, beta);
    case ModelKind::generic: return std::nullopt;
  }
  return std::nullopt;
}

Json hamiltonian_to_json(const SpinHamiltonian& hm) {
  Json out;
  out["model"] = "generic";
  out["n_spins"] = hm.n_spins();
  out["h"] = hm.fields();
  Json edges = Json::array();
  const auto& e = hm.topology().edges();
  for (std::size_t k = 0; k < e.size(); ++k) edges.push_back(Json::array({e[k].i, e[k].j, hm.couplings()[k]}));
  out["J"] = edges;
  return out;
}

SpinHamiltonian hamiltonian_from_json(const Json& j) {
  const std::string where = "generic model";
  require_known_keys(j, {"schema_version", "model", "name", "description", "n_spins", "h", "J"}, where);
  const int n = get_req<int>(j, "n_spins", where);
  auto h = get_or<std::vector<double>>(j, "h", std::vector<double>(std::max(n, 0), 0.0));
  if (static_cast<int>(h.size()) != n) throw ValidationError(where + ": 'h' must have n_spins entries");
  std::vector<Edge> edges;
  std::vector<double> couplings;
  if (auto it = j.find("J"); it != j.end()) {
    if (!it->is_array()) throw ValidationError(where + ": 'J' must be a list of [i, j, value]");
    for (const auto& e : *it) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
          !e[2].is_number()) {
        throw ValidationError(where + ": 'J' entries must be [i, j, value]");
      }
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
      couplings.push_back(e[2].get<double>());
    }
  }
  Topology topo(n, edges);
  // Topology normalizes edge order, so place couplings by lookup.
  std::vector<double> aligned(topo.size(), 0.0);
  for (std::size_t k = 0; k < edges.size(); ++k) aligned[*topo.index_of(edges[k].i, edges[k].j)] = couplings[k];
  return SpinHamiltonian(std::move(topo), std::move(h), std::move(aligned));
}

ModelSpec model_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("model file: expected an object");
  const auto tag = get_req<std::string>(j, "model", "model file");
  ModelSpec m;
  const std::vector<std::string> common{"schema_version", "model", "name", "description"};
  auto allow = [&](std::vector<std::string> extra) {
    extra.insert(extra.end(), common.begin(), common.end());
    require_known_keys(j, extra, tag + " model");
  };
  const std::string where = tag + " model";
  if (tag == "star") {
    allow({"n_spins", "a", "b"});
    m.kind = ModelKind::star;
    m.n_spins = get_req<int>(j, "n_spins", where);
    m.a = get_req<double>(j, "a", where);
    m.b = get_req<double>(j, "b", where);
  } else if (tag == "star_chain") {
    allow({"n_units", "leaves_per_unit", "a", "b", "j", "boundary"});
    m.kind = ModelKind::star_chain;
    m.n_units = get_req<int>(j, "n_units", where);
    m.leaves_per_unit = get_req<int>(j, "leaves_per_unit", where);
    m.a = get_req<double>(j, "a", where);
    m.b = get_req<double>(j, "b", where);
    m.j = get_req<double>(j, "j", where);
    m.boundary = boundary_from_string(get_or<std::string>(j, "boundary", "periodic"));
    m.n_spins = m.n_units * (m.leaves_per_unit + 1);
  } else if (tag == "ising_1d" || tag == "all_to_all") {
    allow({"n_spins", "h", "j"});
    m.kind = tag == "ising_1d" ? ModelKind::ising_1d : ModelKind::all_to_all;
    m.n_spins = get_req<int>(j, "n_spins", where);
    m.h = get_req<double>(j, "h", where);
    m.j = get_req<double>(j, "j", where);
  } else if (tag == "generic") {
    m.kind = ModelKind::generic;
    m.generic = hamiltonian_from_json(j);
    m.n_spins = m.generic->n_spins();
  } else {
    throw ValidationError("model file: unknown model '" + tag + "'");
  }
  for (double x : {m.a, m.b, m.h, m.j})
    if (!std::isfinite(x)) throw ValidationError(where + ": parameters must be finite");
  // Closed-form families may exceed the enumeration cap.
  if (m.n_spins <= kMaxSpins) (void)m.hamiltonian();
  else if (m.kind != ModelKind::generic) (void)m.analytic_stats(1.0);
  return m;
}

Json model_to_json(const ModelSpec& m) {
  Json out;
  switch (m.kind) {
    case ModelKind::star:
      out = {{"model", "star"}, {"n_spins", m.n_spins}, {"a", m.a}, {"b", m.b}};
      break;
    case ModelKind::star_chain:
      out = {{"model", "star_chain"}, {"n_units", m.n_units}, {"leaves_per_unit", m.leaves_per_unit},
             {"a", m.a}, {"b", m.b}, {"j", m.j}, {"boundary", boundary_name(m.boundary)}};
      break;
    case ModelKind::ising_1d:
    case ModelKind::all_to_all:
      out = {{"model", to_string(m.kind)}, {"n_spins", m.n_spins}, {"h", m.h}, {"j", m.j}};
      break;
    case ModelKind::generic:
      out = hamiltonian_to_json(*m.generic);
      break;
  }
  return out;
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("model file '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

Json thermal_stats_to_json(const ThermalStats& s) {
  return {{"beta", s.beta},
          {"log_partition", s.log_partition},
          {"mean_energy", s.mean_energy},
          {"energy_variance", s.energy_variance},
          {"heat_capacity", s.heat_capacity}};
}

Json optimizer_config_to_json(const OptimizerConfig& c) {
  Json out;
  out["steps"] = c.steps;
  out["learning_rate"] = c.learning_rate;
  if (const auto* cy = std::get_if<CyclicSchedule>(&c.schedule)) {
    out["schedule"] = {{"type", "cyclic"}, {"lr_min", cy->lr_min}, {"lr_max", cy->lr_max},
                       {"up_steps", cy->up_steps}, {"halve_each_cycle", cy->halve_each_cycle}};
  } else {
    out["schedule"] = {{"type", "fixed"}};
  }
  if (const auto* u = std::get_if<UniformInit>(&c.init)) {
    out["init"] = {{"type", "uniform"}, {"lo", u->lo}, {"hi", u->hi}};
  } else if (const auto* e = std::get_if<ExplicitInit>(&c.init)) {
    out["init"] = {{"type", "explicit"}, {"theta", e->theta}};
  } else {
    out["init"] = {{"type", "warm_start"}};
  }
  out["seed"] = c.seed;
  out["restarts"] = c.restarts;
  if (c.bound_c) out["bound_c"] = *c.bound_c;
  if (!c.restart_learning_rates.empty()) out["restart_learning_rates"] = c.restart_learning_rates;
  return out;
}

OptimizerConfig optimizer_config_from_json(const Json& j) {
  const std::string where = "optimizer";
  require_known_keys(j, {"steps", "learning_rate", "schedule", "init", "seed", "restarts", "bound_c",
                         "restart_learning_rates", "threads"},
                     where);
  OptimizerConfig c;
  c.steps = get_or<int>(j, "steps", c.steps);
  c.learning_rate = get_or<double>(j, "learning_rate", c.learning_rate);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.restarts = get_or<int>(j, "restarts", c.restarts);
  c.threads = get_or<int>(j, "threads", c.threads);
  if (j.contains("bound_c")) c.bound_c = j.at("bound_c").get<double>();
  c.restart_learning_rates = get_or<std::vector<double>>(j, "restart_learning_rates", {});
  if (auto it = j.find("schedule"); it != j.end()) {
    const auto type = get_req<std::string>(*it, "type", "schedule");
    if (type == "fixed") {
      require_known_keys(*it, {"type"}, "schedule");
    } else if (type == "cyclic") {
      require_known_keys(*it, {"type", "lr_min", "lr_max", "up_steps", "halve_each_cycle"}, "schedule");
      CyclicSchedule s;
      s.lr_min = get_req<double>(*it, "lr_min", "schedule");
      s.lr_max = get_req<double>(*it, "lr_max", "schedule");
      s.up_steps = get_req<int>(*it, "up_steps", "schedule");
      s.halve_each_cycle = get_or<bool>(*it, "halve_each_cycle", false);
      c.schedule = s;
    } else {
      throw ValidationError("schedule: unknown type '" + type + "'");
    }
  }
  if (auto it = j.find("init"); it != j.end()) {
    const auto type = get_req<std::string>(*it, "type", "init");
    if (type == "uniform") {
      require_known_keys(*it, {"type", "lo", "hi"}, "init");
      c.init = UniformInit{get_or<double>(*it, "lo", -1.0), get_or<double>(*it, "hi", 0.0)};
    } else if (type == "explicit") {
      require_known_keys(*it, {"type", "theta"}, "init");
      c.init = ExplicitInit{get_req<std::vector<double>>(*it, "theta", "init")};
    } else if (type == "warm_start") {
      require_known_keys(*it, {"type"}, "init");
      c.init = WarmStart{};
    } else {
      throw ValidationError("init: unknown type '" + type + "'");
    }
  }
  c.validate();
  return c;
}

Json optimization_run_to_json(const OptimizationRun& r) {
  Json out;
  out["config"] = optimizer_config_to_json(r.config);
  out["seed"] = r.seed;
  out["learning_rate"] = r.learning_rate;
  out["param_names"] = r.param_names;
  out["initial_theta"] = r.initial_theta;
  out["best_theta"] = r.best_theta;
  out["final_theta"] = r.final_theta;
  out["best_c"] = r.best_c;
  out["best_step"] = r.best_step;
  out["aborted"] = r.aborted;
  if (!r.diagnostic.empty()) out["diagnostic"] = r.diagnostic;
  Json traj = Json::array();
  for (const auto& p : r.trajectory) traj.push_back(Json::array({p.step, p.c, p.learning_rate}));
  out["trajectory"] = traj;
  Json rs = Json::array();
  for (const auto& s : r.restarts) {
    Json e{{"index", s.index}, {"seed", s.seed}, {"learning_rate", s.learning_rate}, {"best_c", s.best_c},
           {"aborted", s.aborted}};
    if (!s.diagnostic.empty()) e["diagnostic"] = s.diagnostic;
    rs.push_back(e);
  }
  out["restarts"] = rs;
  return out;
}

Json curve_to_json(const ScalingCurve& c) {
  Json out;
  out["name"] = c.name;
  out["method"] = c.method;
  Json pts = Json::array();
  for (const auto& p : c.points) {
    Json e{{"n", p.n}, {"value", p.value}};
    if (!p.params.empty()) e["params"] = p.params;
    pts.push_back(e);
  }
  out["points"] = pts;
  if (c.fit) {
    out["fit"] = {{"exponent", c.fit->exponent}, {"prefactor", c.fit->prefactor},
                  {"residual", c.fit->residual}, {"n_lo", c.fit->n_lo},
                  {"n_hi", c.fit->n_hi},         {"points", c.fit->points}};
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc()) throw NumericalError("cannot format double");
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last) throw ValidationError("not a number: '" + s + "'");
  return x;
}

void write_curve_csv(std::ostream& os, const ScalingCurve& c) {
  std::set<std::string> keys;
  for (const auto& p : c.points)
    for (const auto& [k, v] : p.params) keys.insert(k);
  os << "n,value";
  for (const auto& k : keys) os << ",param:" << k;
  os << '\n';
  for (const auto& p : c.points) {
    os << format_double(p.n) << ',' << format_double(p.value);
    for (const auto& k : keys) {
      os << ',';
      if (auto it = p.params.find(k); it != p.params.end()) os << format_double(it->second);
    }
    os << '\n';
  }
}

ScalingCurve read_curve_csv(std::istream& is, const std::string& name) {
  ScalingCurve c;
  c.name = name;
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("csv: missing header");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "n" || header[1] != "value") {
    throw ValidationError("csv: header must start with n,value");
  }
  for (std::size_t k = 2; k < header.size(); ++k) {
    if (header[k].rfind("param:", 0) != 0) throw ValidationError("csv: unexpected column '" + header[k] + "'");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw ValidationError("csv: row has wrong number of cells");
    CurvePoint p;
    p.n = parse_double(cells[0]);
    p.value = parse_double(cells[1]);
    for (std::size_t k = 2; k < cells.size(); ++k) {
      if (!cells[k].empty()) p.params[header[k].substr(6)] = parse_double(cells[k]);
    }
    c.points.push_back(std::move(p));
  }
  return c;
}

void write_curve_csv_file(const std::string& path, const ScalingCurve& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  write_curve_csv(out, c);
}

ScalingCurve read_curve_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_curve_csv(in, path);
}

}  // namespace spinthermo
