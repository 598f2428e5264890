// SPDX-License-Identifier: Apache-2.0

#include "isac/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace isac {

using json = nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::optimal: return "optimal";
    case Method::sub1: return "sub1";
    case Method::sub2: return "sub2";
    case Method::upper_bound: return "upper_bound";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::optimal, Method::sub1, Method::sub2, Method::upper_bound})
    if (name == to_string(m)) return m;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected optimal, sub1, sub2 or upper_bound)");
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::sigma_theta_sq: return "sigma_theta_sq";
    case SweepVariable::gamma_pcrb: return "gamma_pcrb";
    case SweepVariable::power_budget: return "power_budget";
    case SweepVariable::gamma: return "gamma";
  }
  return "unknown";
}

std::vector<double> sweep_values(double from, double to, int points, bool log_spacing) {
  if (points < 2) throw ConfigError("sweep needs at least 2 points");
  if (log_spacing && !(from > 0.0 && to > 0.0)) throw ConfigError("log sweep bounds must be positive");
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) {
    const double u = static_cast<double>(i) / (points - 1);
    v[i] = log_spacing ? std::exp(std::log(from) + u * (std::log(to) - std::log(from))) : from + u * (to - from);
  }
  v.front() = from;
  v.back() = to;
  return v;
}

ExperimentConfig builtin_scenario() {
  ExperimentConfig c;
  Scenario& s = c.scenario;
  s.n_tx = 8;
  s.n_rx = 10;
  s.n_an = s.n_tx - 1;
  s.angles = {-1.22, -0.79, -0.44, 0.87};
  s.probs = {0.2, 0.1, 0.4, 0.3};
  s.sigma_theta_sq = 1e-4;
  s.path_gain = db_to_linear(-40.0);
  s.rcs_min_gain = 0.32;
  s.noise_user = db_to_linear(-80.0);
  s.noise_eve = db_to_linear(-80.0);
  s.noise_radar = db_to_linear(-80.0);
  s.power_budget = db_to_linear(20.0);
  c.user_channel_gain = db_to_linear(-80.0);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) c.seeds.push_back(seed);
  return c;
}

Scenario ExperimentConfig::scenario_for(std::uint64_t seed) const {
  Scenario s = scenario;
  s.user_channel = fixed_user_channel ? *fixed_user_channel : rayleigh_user_channel(seed, user_channel_gain, s.n_tx);
  return s;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("methods: at least one method is required");
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (!(gamma_pcrb > 0.0)) throw ConfigError("gamma_pcrb: must be positive");
  if (!(user_channel_gain > 0.0) && !fixed_user_channel)
    throw ConfigError("scenario.user_channel_gain_db: must be finite");
  if (angle_grid_points < 1) throw ConfigError("angle_grid_points: must be positive");
  if (!std::isfinite(eval_path_loss_db)) throw ConfigError("eval_path_loss_db: must be finite");
  if (quadrature.nodes_per_component < 2) throw ConfigError("quadrature.nodes_per_component: must be at least 2");
  if (!(quadrature.half_width_sigmas > 0.0)) throw ConfigError("quadrature.half_width_sigmas: must be positive");
  if (!(quadrature.rel_tol > 0.0)) throw ConfigError("quadrature.rel_tol: must be positive");
  const GammaSearchConfig& g = optimizer.search;
  if (g.grid_points < 3) throw ConfigError("gamma_search.grid_points: must be at least 3");
  if (!(g.gamma_min > 0.0)) throw ConfigError("gamma_search.gamma_min: must be positive");
  if (g.gamma_max > 0.0 && !(g.gamma_max > g.gamma_min))
    throw ConfigError("gamma_search.gamma_max: must exceed gamma_min (or be 0 for automatic)");
  if (!(g.golden_rel_tol > 0.0)) throw ConfigError("gamma_search.golden_rel_tol: must be positive");
  if (!(optimizer.solver.tol >= 1e-12 && optimizer.solver.tol <= 1e-4))
    throw ConfigError("solver.tol: must lie in [1e-12, 1e-4]");
  if (optimizer.solver.max_iterations < 1) throw ConfigError("solver.max_iterations: must be positive");
  if (optimizer.sub2_grid_points < 2) throw ConfigError("sub2_grid_points: must be at least 2");
  if (sweep) {
    if (sweep->values.size() < 2) throw ConfigError("sweep: needs at least 2 points");
    for (double v : sweep->values) {
      if (!std::isfinite(v)) throw ConfigError("sweep: values must be finite");
      if (sweep->variable != SweepVariable::power_budget && !(v > 0.0))
        throw ConfigError("sweep: values of " + to_string(sweep->variable) + " must be positive");
    }
    if (sweep->variable == SweepVariable::gamma)
      for (Method m : methods)
        if (m != Method::optimal) throw ConfigError("sweep: variable gamma only applies to method optimal");
  }
  try {
    scenario_for(seeds.front()).validate();
  } catch (const ModelError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

namespace {

// Typed access to one JSON object; rejects keys that are never read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + "expected an object");
  }

  void done() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(where(key) + "unknown key");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(where(key) + "must be finite");
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + "expected an integer");
    out = v.get<int>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + "expected a string");
    out = v.get<std::string>();
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(where(key + "[" + std::to_string(i) + "]") + "expected a number");
      out.push_back(v[i].get<double>());
    }
  }

  void dbm(const std::string& key, double& linear) {
    double db = 0.0;
    if (!has(key)) return;
    number(key, db);
    linear = db_to_linear(db);
  }

  std::string where(const std::string& key) const {
    return (key.empty() ? (path_.empty() ? std::string("config") : path_) : field(key)) + ": ";
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_scenario(Section&& sec, ExperimentConfig& c) {
  Scenario& s = c.scenario;
  sec.integer("n_tx", s.n_tx);
  sec.integer("n_rx", s.n_rx);
  const bool explicit_an = sec.has("n_an");
  sec.integer("n_an", s.n_an);
  if (!explicit_an) s.n_an = s.n_tx - 1;
  sec.numbers("angles_rad", s.angles);
  sec.numbers("probs", s.probs);
  sec.number("sigma_theta_sq", s.sigma_theta_sq);
  if (sec.has("target_path_loss_db")) {
    double loss = 0.0;
    sec.number("target_path_loss_db", loss);
    s.path_gain = db_to_linear(-loss);
  }
  sec.number("rcs_min_gain", s.rcs_min_gain);
  sec.dbm("noise_user_dbm", s.noise_user);
  sec.dbm("noise_eve_dbm", s.noise_eve);
  sec.dbm("noise_radar_dbm", s.noise_radar);
  sec.dbm("power_budget_dbm", s.power_budget);
  sec.dbm("user_channel_gain_db", c.user_channel_gain);
  if (sec.has("user_channel")) {
    const json& v = sec.raw("user_channel");
    const std::string f = sec.field("user_channel");
    if (!v.is_array()) throw ConfigError(f + ": expected an array of [re, im] pairs");
    cvec h(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      const json& e = v[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError(f + "[" + std::to_string(i) + "]: expected [re, im]");
      h(static_cast<Eigen::Index>(i)) = cdouble(e[0].get<double>(), e[1].get<double>());
    }
    c.fixed_user_channel = h;
  }
  if (sec.has("rho0_convention")) {
    std::string conv;
    sec.string("rho0_convention", conv);
    if (conv == "symmetric") c.rho0 = Rho0Convention::symmetric;
    else if (conv == "first_element") c.rho0 = Rho0Convention::first_element;
    else throw ConfigError(sec.where("rho0_convention") + "expected symmetric or first_element");
  }
}

SweepSpec read_sweep(Section&& sec) {
  SweepSpec sw;
  std::string var = "gamma_pcrb";
  sec.string("variable", var);
  bool known = false;
  for (SweepVariable v : {SweepVariable::sigma_theta_sq, SweepVariable::gamma_pcrb, SweepVariable::power_budget,
                          SweepVariable::gamma})
    if (var == to_string(v)) {
      sw.variable = v;
      known = true;
    }
  if (!known) throw ConfigError(sec.where("variable") + "unknown sweep variable '" + var + "'");

  if (sec.has("values")) {
    sec.numbers("values", sw.values);
    if (sec.has("from") || sec.has("to") || sec.has("points") || sec.has("spacing"))
      throw ConfigError(sec.where("values") + "give either values or a from/to range, not both");
    sec.done();
    return sw;
  }
  double from = 0.0, to = 0.0;
  int points = 0;
  std::string spacing = "lin";
  if (!sec.has("from") || !sec.has("to") || !sec.has("points"))
    throw ConfigError(sec.where("") + "needs values or from, to and points");
  sec.number("from", from);
  sec.number("to", to);
  sec.integer("points", points);
  sec.string("spacing", spacing);
  if (spacing != "lin" && spacing != "log") throw ConfigError(sec.where("spacing") + "expected lin or log");
  if (points < 2) throw ConfigError(sec.where("points") + "must be at least 2");
  if (sw.variable != SweepVariable::power_budget && !(from > 0.0 && to > 0.0))
    throw ConfigError(sec.where("") + "range must be positive");
  try {
    sw.values = sweep_values(from, to, points, spacing == "log");
  } catch (const ConfigError& e) {
    throw ConfigError(sec.where("") + e.what());
  }
  sec.done();
  return sw;
}

std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    const auto p = msg.find("parse error");
    throw ConfigError("syntax error at " + position_of(text, e.byte) + ": " +
                      (p == std::string::npos ? msg : msg.substr(p)));
  }

  ExperimentConfig c = builtin_scenario();
  {
    Section root(doc, "");
    if (root.has("scenario")) read_scenario(Section(root.raw("scenario"), "scenario"), c);
    if (root.has("quadrature")) {
      Section q(root.raw("quadrature"), "quadrature");
      q.integer("nodes_per_component", c.quadrature.nodes_per_component);
      q.number("half_width_sigmas", c.quadrature.half_width_sigmas);
      q.number("rel_tol", c.quadrature.rel_tol);
      q.done();
    }
    if (root.has("gamma_search")) {
      Section g(root.raw("gamma_search"), "gamma_search");
      g.integer("grid_points", c.optimizer.search.grid_points);
      g.number("gamma_min", c.optimizer.search.gamma_min);
      g.number("gamma_max", c.optimizer.search.gamma_max);
      g.number("golden_rel_tol", c.optimizer.search.golden_rel_tol);
      g.done();
    }
    if (root.has("solver")) {
      Section s(root.raw("solver"), "solver");
      s.number("tol", c.optimizer.solver.tol);
      s.integer("max_iterations", c.optimizer.solver.max_iterations);
      s.done();
    }
    root.integer("sub2_grid_points", c.optimizer.sub2_grid_points);
    root.number("t_min", c.optimizer.t_min);
    root.number("gamma_pcrb", c.gamma_pcrb);
    if (root.has("sweep")) c.sweep = read_sweep(Section(root.raw("sweep"), "sweep"));
    if (root.has("methods")) {
      const json& m = root.raw("methods");
      if (!m.is_array()) throw ConfigError("methods: expected an array of strings");
      c.methods.clear();
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i].is_string()) throw ConfigError("methods[" + std::to_string(i) + "]: expected a string");
        try {
          c.methods.push_back(parse_method(m[i].get<std::string>()));
        } catch (const ConfigError& e) {
          throw ConfigError("methods[" + std::to_string(i) + "]: " + e.what());
        }
      }
    }
    if (root.has("seeds")) {
      const json& s = root.raw("seeds");
      if (!s.is_array()) throw ConfigError("seeds: expected an array of non-negative integers");
      c.seeds.clear();
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s[i].is_number_unsigned())
          throw ConfigError("seeds[" + std::to_string(i) + "]: expected a non-negative integer");
        c.seeds.push_back(s[i].get<std::uint64_t>());
      }
    }
    if (root.has("seed_count")) {
      int n = 0;
      root.integer("seed_count", n);
      if (n < 1) throw ConfigError("seed_count: must be positive");
      c.seeds.clear();
      for (int i = 1; i <= n; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    root.string("output", c.output);
    root.number("eval_path_loss_db", c.eval_path_loss_db);
    root.integer("angle_grid_points", c.angle_grid_points);
    root.done();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace isac
