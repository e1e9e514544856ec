#include "collab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "collab/errors.hpp"

namespace collab {
namespace {

constexpr double kMaxSweepCells = 1e4;

RawPlayer make_player(std::string id, CostModel cost,
                      std::vector<std::pair<std::string, EffortMap>> projects) {
  RawPlayer p;
  p.id = std::move(id);
  p.cost = cost;
  p.projects = std::move(projects);
  return p;
}

EffortMap lin(double a) { return EffortMap::Linear(a); }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double harmonic(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

PoaReport make_row(std::string instance, const Instance& inst, double param,
                   double eq, double opt) {
  PoaReport r;
  r.instance = std::move(instance);
  r.rule = inst.project(0).sharing.name();
  r.n = inst.num_players();
  r.param = param;
  r.eq_welfare = eq;
  r.opt_welfare = opt;
  r.ratio = opt / eq;
  return r;
}

template <typename T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> fallback) {
  return v.empty() ? fallback : v;
}

int or_default(int v, int fallback) { return v > 0 ? v : fallback; }

std::vector<PoaReport> lowerbound(const ExperimentSpec& spec) {
  std::vector<PoaReport> rows;
  for (double alpha : or_default(spec.alpha_list, {50.0})) {
    for (int n : or_default(spec.n_list, {2, 4, 16, 100})) {
      const Instance inst = lower_bound_instance(n, alpha, spec.beta);
      const EquilibriumResult eq = br_dynamics(inst, spec.solver);
      const OptResult opt = solve_opt(inst, spec.solver);
      const LowerBoundPrediction pred = lower_bound_prediction(n, alpha, spec.beta);
      PoaReport r = make_row("lowerbound-n" + std::to_string(n), inst, alpha,
                             eq.welfare, opt.value);
      const double on_first = project_total(inst, eq.profile, 0) /
                              std::max(eq.profile.values().sum(), 1e-300);
      r.predicted = pred.ratio;
      r.bound = 1.02 * pred.ratio;
      r.pass = eq.converged && on_first >= 0.999 &&
               std::abs(r.ratio - pred.ratio) <= 0.02 * pred.ratio;
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<PoaReport> elasticity(const ExperimentSpec& spec) {
  std::vector<PoaReport> rows;
  const int count = or_default(spec.instances, 50);
  for (double alpha : or_default(spec.alpha_list, {0.25, 0.5, 0.75})) {
    std::mt19937_64 rng(spec.seed + static_cast<std::uint64_t>(std::lround(alpha * 1000)));
    const PoaAlpha pa = poa_alpha_analytic(alpha);
    for (int k = 0; k < count; ++k) {
      const Instance inst = random_constant_elasticity_instance(alpha, rng);
      const EquilibriumResult eq = br_dynamics(inst, spec.solver);
      const OptResult opt = solve_opt(inst, spec.solver);
      std::string name = "elasticity-a" + num(alpha) + "-" + std::to_string(k);
      if (!eq.converged) name += "-unconverged";
      PoaReport r = make_row(name, inst, alpha, eq.welfare, opt.value);
      r.predicted = pa.poa;
      r.bound = 1.0 / (pa.guarantee - 0.01);
      r.pass = eq.converged && eq.welfare / opt.value >= pa.guarantee - 0.01;
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<PoaReport> linearcost(const ExperimentSpec& spec) {
  std::vector<PoaReport> rows;
  for (int n : or_default(spec.n_list, {1, 2, 4, 8, 16})) {
    const Instance inst = linear_cost_instance(n);
    const EquilibriumResult eq = br_dynamics(inst, spec.solver);
    const OptResult opt = solve_opt(inst, spec.solver);
    PoaReport r = make_row("linearcost-n" + std::to_string(n), inst, n,
                           eq.welfare, opt.value);
    const double q_pred = std::pow((n - 0.5) / n, 2);
    const double sw_pred = (2.0 * n - 1.0) / (4.0 * n * n);
    r.predicted = linear_cost_poa(n);
    r.bound = r.predicted + 1e-4;
    r.pass = eq.converged && std::abs(eq.profile.values().sum() - q_pred) < 1e-6 &&
             std::abs(eq.welfare - sw_pred) < 1e-6 &&
             std::abs(r.ratio - r.predicted) <= 1e-4;
    rows.push_back(r);
  }
  return rows;
}

// n players on two projects under the harmonic ranking rule. The row passes
// when share >= MC / H_n held on 200 random cases of size n and learning
// reached welfare within a factor H_n + 1 of OPT.
std::vector<PoaReport> ranking(const ExperimentSpec& spec) {
  std::vector<PoaReport> rows;
  const int rounds = or_default(spec.rounds, 5000);
  const SharingRule rule = SharingRule::RankingHarmonic();
  for (int n : or_default(spec.n_list, {2, 3, 4, 6})) {
    std::mt19937_64 rng(spec.seed + static_cast<std::uint64_t>(n));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double factor = 0.0;
    for (int c = 0; c < 200; ++c) {
      const ValueFunction vf =
          c % 2 == 0 ? ValueFunction::Power(0.5 + unit(rng), 0.2 + 0.8 * unit(rng))
                     : ValueFunction::Saturating(0.5 + unit(rng), 0.3 + 2.0 * unit(rng));
      Vector q(n);
      for (int i = 0; i < n; ++i) q[i] = 2.0 * unit(rng);
      factor = std::max(factor, ranking_approx_factor(vf, q));
    }

    RawInstance raw;
    raw.sharing = rule;
    raw.projects.push_back({"p1", ValueFunction::Power(1.0 + unit(rng), 0.5), std::nullopt});
    raw.projects.push_back({"p2", ValueFunction::Saturating(1.0 + unit(rng), 1.0), std::nullopt});
    for (int i = 0; i < n; ++i) {
      raw.players.push_back(make_player("i" + std::to_string(i + 1),
                                        CostModel::Budget(0.5 + unit(rng)),
                                        {{"p1", lin(0.5 + unit(rng))}, {"p2", lin(0.5 + unit(rng))}}));
    }
    const Instance inst = validate_instance(raw);
    SolverConfig cfg = spec.solver;
    cfg.horizon = rounds;
    cfg.seed = spec.seed;
    const LearningTrace trace = no_regret_play(inst, cfg);
    const OptResult opt = solve_opt(inst, spec.solver);
    PoaReport r = make_row("ranking-n" + std::to_string(n), inst, harmonic(n),
                           trace.average_welfare, opt.value);
    r.predicted = harmonic(n) + 1.0;
    r.bound = r.predicted;
    r.pass = factor <= 1.0 + 1e-9 && r.ratio <= r.bound;
    rows.push_back(r);
  }
  return rows;
}

std::vector<PoaReport> softbudget(const ExperimentSpec& spec) {
  std::vector<PoaReport> rows;
  const int count = or_default(spec.instances, 20);
  for (double mu : or_default(spec.mu_list, {1.0})) {
    std::mt19937_64 rng(spec.seed + static_cast<std::uint64_t>(std::lround(mu * 1000)));
    const SoftBounds b = soft_budget_bounds(mu);
    for (int k = 0; k < count; ++k) {
      const Instance inst = random_soft_cost_instance(mu, rng);
      const EquilibriumResult eq = br_dynamics(inst, spec.solver);
      const OptResult opt = solve_opt(inst, spec.solver);
      const ProductionCost at_eq = production_and_cost(eq.profile, inst);
      const ProductionCost at_opt = production_and_cost(opt.profile, inst);
      PoaReport r = make_row("softbudget-mu" + num(mu) + "-" + std::to_string(k),
                             inst, mu, eq.welfare, opt.value);
      r.predicted = 1.0 / b.welfare;
      r.bound = 1.0 / (b.welfare - 0.01);
      const double slack = welfare_plus_production_slack(inst, eq.profile, opt.value);
      r.pass = eq.converged && eq.welfare / opt.value >= b.welfare - 0.01 &&
               at_eq.production / at_opt.production >= b.production - 0.01 &&
               (1.0 + mu) * at_eq.cost <= at_eq.production + 1e-6 &&
               slack >= -1e-6 * (1.0 + std::abs(opt.value));
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<PoaReport> nonmonotone(const ExperimentSpec& spec) {
  std::vector<PoaReport> rows;
  const ValueFunction vf = ValueFunction::SinglePeaked(4.0);
  for (int n : or_default(spec.n_list, {2, 3, 4, 5, 6, 7, 8, 9, 10})) {
    const NonmonotoneBound b = nonmonotone_poa_bound(vf, n);
    PoaReport r;
    r.instance = "nonmonotone-n" + std::to_string(n);
    r.rule = "proportional";
    r.n = n;
    r.param = 4.0;
    r.eq_welfare = vf.of_total(b.q_eq);
    r.opt_welfare = vf.of_total(b.q_opt);
    r.ratio = b.realized_poa;
    r.predicted = (n + 1.0) * (n + 1.0) / (4.0 * n);
    r.bound = b.bound;
    r.pass = std::abs(b.q_eq - n / (n + 1.0)) <= 1e-10 && b.eq_above &&
             std::abs(r.ratio - r.predicted) <= 1e-6 && r.ratio >= r.bound;
    rows.push_back(r);
  }
  return rows;
}

std::vector<PoaReport> bayes(const ExperimentSpec& spec) {
  std::vector<PoaReport> rows;
  const int rounds = or_default(spec.rounds, 50000);
  SolverConfig cfg = spec.solver;
  cfg.horizon = rounds;
  cfg.seed = spec.seed;
  for (const auto& [name, inst] : learning_corpus()) {
    const LearningTrace trace = no_regret_play(inst, cfg);
    const OptResult opt = solve_opt(inst, spec.solver);
    PoaReport r = make_row("learning-" + name, inst, rounds, trace.average_welfare,
                           opt.value);
    r.predicted = 2.0;
    r.bound = 1.0 / (0.5 - 0.02);
    r.pass = trace.average_welfare >= (0.5 - 0.02) * opt.value;
    rows.push_back(r);
  }
  for (const auto& [name, pair] : bayes_corpus()) {
    const auto& [inst, dists] = pair;
    const BayesLearningResult res =
        bayes_learning_welfare(inst, dists, rounds, spec.seed, spec.solver);
    const double eopt = exact_expected_opt(inst, dists, spec.solver);
    PoaReport r = make_row("bayes-" + name, inst, rounds, res.tail_welfare, eopt);
    r.predicted = 2.0;
    r.bound = 1.0 / (0.5 - 0.03);
    r.pass = res.tail_welfare >= (0.5 - 0.03) * eopt;
    rows.push_back(r);
  }
  return rows;
}

double grid_value(const std::map<std::string, double>& cell, const std::string& key,
                  double fallback) {
  const auto it = cell.find(key);
  return it == cell.end() ? fallback : it->second;
}

int as_count(double v, const char* what) {
  if (v < 1.0 || v != std::floor(v)) {
    throw InvalidInput(std::string(what) + " must be a positive integer");
  }
  return static_cast<int>(v);
}

PoaReport sweep_cell(const std::string& tmpl,
                     const std::map<std::string, double>& cell,
                     const SolverConfig& solver) {
  std::string label = tmpl + "[";
  bool first = true;
  for (const auto& [k, v] : cell) {
    label += (first ? "" : ";") + k + "=" + num(v);
    first = false;
  }
  label += "]";
  const double param = cell.empty() ? 0.0 : cell.begin()->second;

  if (tmpl == "symmetric") {
    const int n = as_count(grid_value(cell, "n", 3), "n");
    const double alpha = grid_value(cell, "alpha", 0.5);
    RawInstance raw;
    raw.projects.push_back({"p1", ValueFunction::Power(1.0, alpha), std::nullopt});
    raw.projects.push_back({"p2", ValueFunction::Power(0.5, alpha), std::nullopt});
    for (int i = 0; i < n; ++i) {
      raw.players.push_back(make_player("i" + std::to_string(i + 1), CostModel::Budget(1.0),
                                        {{"p1", lin(1.0)}, {"p2", lin(1.0)}}));
    }
    const Instance inst = validate_instance(raw);
    const EquilibriumResult eq = br_dynamics(inst, solver);
    const OptResult opt = solve_opt(inst, solver);
    PoaReport r = make_row(label, inst, param, eq.welfare, opt.value);
    r.predicted = poa_alpha_analytic(alpha).poa;
    r.bound = r.predicted + 0.01;
    r.pass = eq.converged && r.ratio <= r.bound;
    return r;
  }
  if (tmpl == "lowerbound") {
    const int n = as_count(grid_value(cell, "n", 4), "n");
    const double alpha = grid_value(cell, "alpha", 50.0);
    const double beta = grid_value(cell, "beta", 1e-3);
    const Instance inst = lower_bound_instance(n, alpha, beta);
    const EquilibriumResult eq = br_dynamics(inst, solver);
    const OptResult opt = solve_opt(inst, solver);
    PoaReport r = make_row(label, inst, param, eq.welfare, opt.value);
    r.predicted = lower_bound_prediction(n, alpha, beta).ratio;
    r.bound = 1.02 * r.predicted;
    r.pass = eq.converged && std::abs(r.ratio - r.predicted) <= 0.02 * r.predicted;
    return r;
  }
  if (tmpl == "linearcost") {
    const int n = as_count(grid_value(cell, "n", 2), "n");
    const Instance inst = linear_cost_instance(n);
    const EquilibriumResult eq = br_dynamics(inst, solver);
    const OptResult opt = solve_opt(inst, solver);
    PoaReport r = make_row(label, inst, param, eq.welfare, opt.value);
    r.predicted = linear_cost_poa(n);
    r.bound = r.predicted + 1e-4;
    r.pass = eq.converged && std::abs(r.ratio - r.predicted) <= 1e-4;
    return r;
  }
  if (tmpl == "softbudget") {
    const int n = as_count(grid_value(cell, "n", 2), "n");
    const double mu = grid_value(cell, "mu", 1.0);
    RawInstance raw;
    raw.projects.push_back({"p1", ValueFunction::Sqrt(), std::nullopt});
    for (int i = 0; i < n; ++i) {
      raw.players.push_back(make_player("i" + std::to_string(i + 1),
                                        CostModel::Power(1.0, mu), {{"p1", lin(1.0)}}));
    }
    const Instance inst = validate_instance(raw);
    const EquilibriumResult eq = br_dynamics(inst, solver);
    const OptResult opt = solve_opt(inst, solver);
    PoaReport r = make_row(label, inst, param, eq.welfare, opt.value);
    const SoftBounds b = soft_budget_bounds(mu);
    r.predicted = 1.0 / b.welfare;
    r.bound = 1.0 / (b.welfare - 0.01);
    r.pass = eq.converged && r.ratio <= r.bound;
    return r;
  }
  throw InvalidInput("unknown sweep template '" + tmpl + "'");
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "lowerbound", "elasticity", "linearcost", "ranking",
      "softbudget", "nonmonotone", "bayes"};
  return names;
}

std::vector<PoaReport> run_experiment(const ExperimentSpec& spec) {
  spec.solver.validate();
  if (spec.name == "lowerbound") return lowerbound(spec);
  if (spec.name == "elasticity") return elasticity(spec);
  if (spec.name == "linearcost") return linearcost(spec);
  if (spec.name == "ranking") return ranking(spec);
  if (spec.name == "softbudget") return softbudget(spec);
  if (spec.name == "nonmonotone") return nonmonotone(spec);
  if (spec.name == "bayes") return bayes(spec);
  throw InvalidInput("unknown experiment '" + spec.name + "'");
}

std::string to_csv(const std::vector<PoaReport>& rows) {
  std::string out = poa_csv_header() + "\n";
  for (const PoaReport& r : rows) out += to_csv_row(r) + "\n";
  return out;
}

const std::vector<std::string>& sweep_templates() {
  static const std::vector<std::string> names{"symmetric", "lowerbound",
                                              "linearcost", "softbudget"};
  return names;
}

std::vector<PoaReport> run_sweep(
    const std::string& template_name,
    const std::vector<std::pair<std::string, std::vector<double>>>& grid,
    const SolverConfig& solver) {
  if (std::find(sweep_templates().begin(), sweep_templates().end(), template_name) ==
      sweep_templates().end()) {
    throw InvalidInput("unknown sweep template '" + template_name + "'");
  }
  static const std::map<std::string, std::vector<std::string>> known{
      {"symmetric", {"alpha", "n"}},
      {"lowerbound", {"alpha", "beta", "n"}},
      {"linearcost", {"n"}},
      {"softbudget", {"mu", "n"}}};
  const auto& allowed = known.at(template_name);
  for (const auto& axis : grid) {
    if (std::find(allowed.begin(), allowed.end(), axis.first) == allowed.end()) {
      throw InvalidInput("template '" + template_name + "' has no axis '" + axis.first + "'");
    }
  }
  auto axes = grid;
  std::sort(axes.begin(), axes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t a = 1; a < axes.size(); ++a) {
    if (axes[a].first == axes[a - 1].first) {
      throw InvalidInput("grid axis '" + axes[a].first + "' given twice");
    }
  }
  double cells = axes.empty() ? 0.0 : 1.0;
  for (const auto& axis : axes) cells *= static_cast<double>(axis.second.size());
  if (cells > kMaxSweepCells) throw InvalidInput("sweep grid exceeds 10^4 cells");

  std::vector<PoaReport> rows;
  if (cells == 0.0) return rows;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    std::map<std::string, double> cell;
    for (std::size_t a = 0; a < axes.size(); ++a) cell[axes[a].first] = axes[a].second[idx[a]];
    rows.push_back(sweep_cell(template_name, cell, solver));
    // Last axis varies fastest.
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) return rows;
    }
  }
}

std::vector<std::pair<std::string, Instance>> learning_corpus() {
  std::vector<std::pair<std::string, Instance>> out;
  {
    RawInstance raw;
    raw.projects.push_back({"p1", ValueFunction::Power(1.0, 0.5), std::nullopt});
    raw.projects.push_back({"p2", ValueFunction::Power(1.5, 0.5), std::nullopt});
    raw.players.push_back(make_player("a", CostModel::Budget(1.0), {{"p1", lin(1.0)}, {"p2", lin(0.8)}}));
    raw.players.push_back(make_player("b", CostModel::Budget(1.5), {{"p1", lin(1.2)}, {"p2", lin(1.0)}}));
    out.emplace_back("power2x2", validate_instance(raw));
  }
  {
    RawInstance raw;
    raw.projects.push_back({"p1", ValueFunction::Saturating(2.0, 1.0), std::nullopt});
    raw.projects.push_back({"p2", ValueFunction::Saturating(1.0, 2.0), std::nullopt});
    for (auto [id, b] : {std::pair{"a", 1.0}, {"b", 0.7}, {"c", 1.3}}) {
      raw.players.push_back(make_player(id, CostModel::Budget(b), {{"p1", lin(1.0)}, {"p2", lin(1.0)}}));
    }
    out.emplace_back("saturating3x2", validate_instance(raw));
  }
  out.emplace_back("linearcost2", linear_cost_instance(2));
  {
    RawInstance raw;
    raw.sharing = SharingRule::ShapleyExact();
    raw.projects.push_back({"p1", ValueFunction::Power(1.0, 0.7), std::nullopt});
    raw.projects.push_back({"p2", ValueFunction::Sqrt(), std::nullopt});
    raw.projects.push_back({"p3", ValueFunction::Saturating(1.5, 1.0), std::nullopt});
    raw.players.push_back(make_player("a", CostModel::Budget(1.0), {{"p1", lin(1.0)}, {"p2", lin(1.0)}}));
    raw.players.push_back(make_player("b", CostModel::Budget(1.0), {{"p2", lin(1.5)}, {"p3", lin(1.0)}}));
    raw.players.push_back(make_player("c", CostModel::Budget(2.0),
                                      {{"p1", lin(0.7)}, {"p2", lin(1.0)}, {"p3", lin(1.2)}}));
    out.emplace_back("shapley3x3", validate_instance(raw));
  }
  {
    RawInstance raw;
    raw.projects.push_back({"p1", ValueFunction::Power(2.0, 0.5), std::nullopt});
    raw.projects.push_back({"p2", ValueFunction::Saturating(1.0, 1.0), std::nullopt});
    raw.players.push_back(make_player("a", CostModel::Power(1.0, 1.0), {{"p1", lin(1.0)}, {"p2", lin(1.0)}}));
    raw.players.push_back(make_player("b", CostModel::Power(1.5, 1.0), {{"p1", lin(0.8)}, {"p2", lin(1.2)}}));
    out.emplace_back("quadratic2x2", validate_instance(raw));
  }
  return out;
}

std::vector<std::pair<std::string, std::pair<Instance, TypeDistribution>>>
bayes_corpus() {
  std::vector<std::pair<std::string, std::pair<Instance, TypeDistribution>>> out;
  for (auto& [name, inst] : learning_corpus()) {
    TypeDistribution d;
    for (int i = 0; i < inst.num_players(); ++i) {
      const Player& pl = inst.player(i);
      std::vector<EffortMap> maps;
      for (int e : pl.edges) maps.push_back(inst.edge(e).map);
      ConcreteType low{pl.cost, maps};
      ConcreteType high = low;
      switch (pl.cost.kind) {
        case CostModel::Kind::kHardBudget:
          high.cost = CostModel::Budget(2.0 * pl.cost.budget);
          break;
        case CostModel::Kind::kSoftPower:
          high.cost = CostModel::Power(2.0 * pl.cost.kappa, pl.cost.mu);
          break;
        case CostModel::Kind::kSoftLinear:
          for (EffortMap& m : high.maps) m = EffortMap::Linear(2.0 * m.ability);
          break;
      }
      d.players.push_back({TypePoint{0.5, low}, TypePoint{0.5, high}});
    }
    out.emplace_back(name, std::pair{inst, d});
  }
  return out;
}

}  // namespace collab
