// SPDX-License-Identifier: Apache-2.0

#include "isac/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "isac/format.hpp"
#include "isac/parallel.hpp"

namespace isac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

int method_rank(Method m) { return static_cast<int>(m); }

// Scenario and optimizer options with the sweep variable applied.
struct PointSetup {
  Scenario scenario;
  double gamma_pcrb = 0.0;
  double gamma = 0.0;  // only for the gamma sweep
};

PointSetup setup_point(const ExperimentConfig& c, std::uint64_t seed, double value) {
  PointSetup p{c.scenario_for(seed), c.gamma_pcrb, 0.0};
  if (!c.sweep) return p;
  switch (c.sweep->variable) {
    case SweepVariable::sigma_theta_sq: p.scenario.sigma_theta_sq = value; break;
    case SweepVariable::gamma_pcrb: p.gamma_pcrb = value; break;
    case SweepVariable::power_budget: p.scenario.power_budget = db_to_linear(value); break;
    case SweepVariable::gamma: p.gamma = value; break;
  }
  return p;
}

std::vector<double> point_values(const ExperimentConfig& c) {
  return c.sweep ? c.sweep->values : std::vector<double>{c.gamma_pcrb};
}

void fill(RunRow& row, const OptimizationResult& r) {
  row.secrecy_rate = r.worst_secrecy_rate;
  row.achieved_pcrb = r.achieved_pcrb;
  row.gamma_star = r.gamma_star ? *r.gamma_star : kNaN;
  row.status = "ok";
}

}  // namespace

std::string status_label(const std::exception& e) {
  if (const auto* oe = dynamic_cast<const OptimizerError*>(&e)) return to_string(oe->kind());
  if (dynamic_cast<const QuadratureError*>(&e)) return "quadrature_nonconvergence";
  if (dynamic_cast<const ModelError*>(&e)) return "invalid_scenario";
  return "error";
}

bool is_hard_failure(const std::string& status) { return status != "ok" && status != "infeasible"; }

std::vector<RunRow> run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const std::vector<double> values = point_values(config);
  std::vector<Method> methods = config.methods;
  std::sort(methods.begin(), methods.end(), [](Method a, Method b) { return method_rank(a) < method_rank(b); });
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  const bool matrices_vary = config.sweep && config.sweep->variable == SweepVariable::sigma_theta_sq;
  std::vector<SensingMatrices> matrices(matrices_vary ? values.size() : 1);
  std::vector<std::string> matrix_error(matrices.size());
  parallel_for(matrices.size(), options.threads, [&](std::size_t i) {
    try {
      matrices[i] = compute_sensing_matrices(setup_point(config, config.seeds.front(), values[i]).scenario,
                                             config.quadrature, config.rho0);
    } catch (const std::exception& e) {
      matrix_error[i] = status_label(e);
    }
  });

  struct Task {
    std::size_t point;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::uint64_t seed : config.seeds) tasks.push_back({i, seed});

  OptimizerOptions opt = config.optimizer;
  opt.search.threads = tasks.size() > 1 ? 1 : options.threads;

  std::vector<std::vector<RunRow>> out(tasks.size());
  parallel_for(tasks.size(), tasks.size() > 1 ? options.threads : 1, [&](std::size_t t) {
    const Task& task = tasks[t];
    const double value = values[task.point];
    const std::size_t mi = matrices_vary ? task.point : 0;
    std::optional<OptimizationResult> sub1;
    std::string sub1_status;
    double sub1_ms = 0.0;

    for (Method method : methods) {
      RunRow row;
      row.seed = task.seed;
      row.sweep_value = value;
      row.method = method;
      row.secrecy_rate = kNaN;
      row.achieved_pcrb = kNaN;
      row.gamma_star = kNaN;
      const bool sub1_before = sub1.has_value() || !sub1_status.empty();
      const auto start = Clock::now();
      try {
        if (!matrix_error[mi].empty()) {
          row.status = matrix_error[mi];
        } else {
          const PointSetup p = setup_point(config, task.seed, value);
          const SensingMatrices& m = matrices[mi];
          auto run_sub1 = [&] {
            if (!sub1 && sub1_status.empty()) {
              const auto s1 = Clock::now();
              try {
                sub1 = optimize_suboptimal1(p.scenario, m, p.gamma_pcrb, opt);
              } catch (const std::exception& e) {
                sub1_status = status_label(e);
              }
              sub1_ms = elapsed_ms(s1);
            }
          };
          switch (method) {
            case Method::optimal:
              if (config.sweep && config.sweep->variable == SweepVariable::gamma)
                fill(row, optimize_fixed_gamma(p.gamma, p.scenario, m, p.gamma_pcrb, opt));
              else
                fill(row, optimize_optimal(p.scenario, m, p.gamma_pcrb, opt));
              break;
            case Method::upper_bound: fill(row, secrecy_upper_bound(p.scenario, m, opt)); break;
            case Method::sub1:
              run_sub1();
              if (sub1) fill(row, *sub1);
              else row.status = sub1_status;
              break;
            case Method::sub2:
              run_sub1();
              if (sub1) fill(row, optimize_suboptimal2(p.scenario, m, p.gamma_pcrb, *sub1, opt));
              else row.status = sub1_status;
              break;
          }
        }
      } catch (const std::exception& e) {
        row.status = status_label(e);
      }
      // sub2 is charged for the sub1 solve it builds on, even when sub1 ran in its own row.
      const bool sub1_in_earlier_row = method == Method::sub2 && sub1_before;
      row.wall_ms = options.timing ? elapsed_ms(start) + (sub1_in_earlier_row ? sub1_ms : 0.0) : 0.0;
      if (row.status != "ok") {
        row.secrecy_rate = kNaN;
        row.achieved_pcrb = kNaN;
        row.gamma_star = kNaN;
      }
      out[t].push_back(std::move(row));
    }
  });

  std::vector<RunRow> rows;
  for (auto& v : out)
    for (auto& r : v) rows.push_back(std::move(r));
  std::stable_sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    if (a.seed != b.seed) return a.seed < b.seed;
    return method_rank(a.method) < method_rank(b.method);
  });
  return rows;
}

void write_run_csv(const std::vector<RunRow>& rows, std::ostream& out, bool timing) {
  out << "seed,sweep_value,method,secrecy_rate,achieved_pcrb,gamma_star,solver_status,wall_ms\n";
  for (const RunRow& r : rows)
    out << r.seed << ',' << fmt_double(r.sweep_value) << ',' << to_string(r.method) << ','
        << fmt_double(r.secrecy_rate) << ',' << fmt_double(r.achieved_pcrb) << ',' << fmt_double(r.gamma_star) << ','
        << r.status << ',' << fmt_double(timing ? r.wall_ms : 0.0) << '\n';
}

std::vector<MeanRow> aggregate_means(const std::vector<RunRow>& rows) {
  std::map<std::pair<double, int>, MeanRow> acc;
  std::map<std::pair<double, int>, int> pcrb_count;
  for (const RunRow& r : rows) {
    const auto key = std::make_pair(r.sweep_value, method_rank(r.method));
    MeanRow& m = acc[key];
    m.sweep_value = r.sweep_value;
    m.method = r.method;
    if (r.status == "ok") {
      ++m.ok;
      m.mean_secrecy_rate += r.secrecy_rate;
      m.mean_achieved_pcrb += r.achieved_pcrb;
      ++pcrb_count[key];
    } else if (r.status == "infeasible") {
      ++m.infeasible;
    } else {
      ++m.failed;
    }
  }
  std::vector<MeanRow> out;
  for (auto& [key, m] : acc) {
    const int rated = m.ok + m.infeasible;
    m.mean_secrecy_rate = rated > 0 ? m.mean_secrecy_rate / rated : kNaN;
    const int n = pcrb_count[key];
    m.mean_achieved_pcrb = n > 0 ? m.mean_achieved_pcrb / n : kNaN;
    out.push_back(m);
  }
  return out;
}

void write_means_csv(const std::vector<MeanRow>& means, std::ostream& out) {
  out << "sweep_value,method,mean_secrecy_rate,mean_achieved_pcrb,ok,infeasible,failed\n";
  for (const MeanRow& m : means)
    out << fmt_double(m.sweep_value) << ',' << to_string(m.method) << ',' << fmt_double(m.mean_secrecy_rate) << ','
        << fmt_double(m.mean_achieved_pcrb) << ',' << m.ok << ',' << m.infeasible << ',' << m.failed << '\n';
}

std::vector<PcrbSweepRow> pcrb_sweep(const ExperimentConfig& config, const std::vector<double>& sigma_values,
                                     int threads) {
  std::vector<PcrbSweepRow> rows(sigma_values.size());
  parallel_for(sigma_values.size(), threads, [&](std::size_t i) {
    Scenario s = config.scenario_for(config.seeds.front());
    s.sigma_theta_sq = sigma_values[i];
    const SensingMatrices m = compute_sensing_matrices(s, config.quadrature, config.rho0);
    const cmat r = (s.power_budget / s.n_tx) * cmat::Identity(s.n_tx, s.n_tx);
    rows[i] = {sigma_values[i], pcrb_exact(r, m, s), pcrb_upper(r, m, s), pcrb_approx(r, m, s)};
  });
  return rows;
}

void write_pcrb_sweep_csv(const std::vector<PcrbSweepRow>& rows, std::ostream& out) {
  out << "sigma_theta_sq,pcrb_exact,pcrb_upper,pcrb_approx\n";
  for (const auto& r : rows)
    out << fmt_double(r.sigma_theta_sq) << ',' << fmt_double(r.exact) << ',' << fmt_double(r.upper) << ','
        << fmt_double(r.approx) << '\n';
}

std::vector<GammaCurveRow> gamma_curves(const ExperimentConfig& config, std::uint64_t seed,
                                        const std::vector<double>& gamma_pcrb_values, int threads) {
  const Scenario s = config.scenario_for(seed);
  const SensingMatrices m = compute_sensing_matrices(s, config.quadrature, config.rho0);
  OptimizerOptions opt = config.optimizer;
  opt.search.threads = threads;
  std::vector<GammaCurveRow> rows;
  for (double g : gamma_pcrb_values) {
    const GammaCurve curve = gamma_curve(s, m, g, opt);
    for (const GammaSample& p : curve.grid) rows.push_back({g, p.gamma, p.f, p.objective, false});
    rows.push_back({g, curve.best.gamma, curve.best.f, curve.best.objective, true});
  }
  return rows;
}

void write_gamma_curve_csv(const std::vector<GammaCurveRow>& rows, std::ostream& out) {
  out << "gamma_pcrb,gamma,f_gamma,objective,refined\n";
  for (const auto& r : rows)
    out << fmt_double(r.gamma_pcrb) << ',' << fmt_double(r.gamma) << ',' << fmt_double(r.f_gamma) << ','
        << fmt_double(r.objective) << ',' << (r.refined ? 1 : 0) << '\n';
}

std::vector<FeasibilityRow> feasibility_sweep(const ExperimentConfig& config,
                                              const std::vector<double>& gamma_pcrb_values) {
  const Scenario s = config.scenario_for(config.seeds.front());
  const SensingMatrices m = compute_sensing_matrices(s, config.quadrature, config.rho0);
  double min_pcrb = kNaN;
  std::string limit_status = "ok";
  try {
    min_pcrb = max_sensing_information(s, m, config.optimizer).min_pcrb;
  } catch (const std::exception& e) {
    limit_status = status_label(e);
  }
  std::vector<FeasibilityRow> rows;
  for (double g : gamma_pcrb_values) {
    FeasibilityRow row;
    row.gamma_pcrb = g;
    row.xi = xi_threshold(g, m, s);
    row.min_pcrb = min_pcrb;
    row.status = limit_status;
    try {
      const P1Feasibility f = check_feasibility_p1(s, m, g, config.optimizer);
      row.vacuous = f.vacuous;
      row.feasible = f.feasible;
      row.margin = f.margin;
    } catch (const std::exception& e) {
      row.status = status_label(e);
      row.margin = kNaN;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_feasibility_csv(const std::vector<FeasibilityRow>& rows, std::ostream& out) {
  out << "gamma_pcrb,xi,vacuous,feasible,margin,min_pcrb,solver_status\n";
  for (const auto& r : rows)
    out << fmt_double(r.gamma_pcrb) << ',' << fmt_double(r.xi) << ',' << (r.vacuous ? 1 : 0) << ','
        << (r.feasible ? 1 : 0) << ',' << fmt_double(r.margin) << ',' << fmt_double(r.min_pcrb) << ',' << r.status
        << '\n';
}

std::vector<BeampatternSample> method_beampattern(const ExperimentConfig& config, std::uint64_t seed, Method method) {
  const Scenario s = config.scenario_for(seed);
  const SensingMatrices m = compute_sensing_matrices(s, config.quadrature, config.rho0);
  OptimizationResult r;
  switch (method) {
    case Method::optimal: r = optimize_optimal(s, m, config.gamma_pcrb, config.optimizer); break;
    case Method::upper_bound: r = secrecy_upper_bound(s, m, config.optimizer); break;
    case Method::sub1: r = optimize_suboptimal1(s, m, config.gamma_pcrb, config.optimizer); break;
    case Method::sub2: {
      const OptimizationResult r1 = optimize_suboptimal1(s, m, config.gamma_pcrb, config.optimizer);
      r = optimize_suboptimal2(s, m, config.gamma_pcrb, r1, config.optimizer);
      break;
    }
  }
  return beampattern(r.beams, uniform_angle_grid(config.angle_grid_points), config.eval_path_loss_db, s);
}

}  // namespace isac
