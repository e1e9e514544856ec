#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "collab/analysis.hpp"
#include "collab/errors.hpp"

namespace collab {
namespace {

std::string pid(int j) { return "p" + std::to_string(j + 1); }
std::string iid(int i) { return "i" + std::to_string(i + 1); }

// Random nonempty participation where every project keeps a participant.
std::vector<std::vector<int>> random_participation(int n, int m,
                                                   std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.6);
  std::uniform_int_distribution<int> pick_player(0, n - 1);
  std::uniform_int_distribution<int> pick_project(0, m - 1);
  std::vector<std::vector<int>> member(static_cast<std::size_t>(n),
                                       std::vector<int>(static_cast<std::size_t>(m), 0));
  for (auto& row : member) {
    for (auto& cell : row) cell = coin(rng) ? 1 : 0;
  }
  for (auto& row : member) {
    if (std::none_of(row.begin(), row.end(), [](int c) { return c; })) {
      row[static_cast<std::size_t>(pick_project(rng))] = 1;
    }
  }
  for (int j = 0; j < m; ++j) {
    bool any = false;
    for (const auto& row : member) any = any || row[static_cast<std::size_t>(j)];
    if (!any) member[static_cast<std::size_t>(pick_player(rng))][static_cast<std::size_t>(j)] = 1;
  }
  return member;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ValueFunction random_concave_value(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0:
      return ValueFunction::Power(uniform(rng, 0.5, 2.0), uniform(rng, 0.2, 1.0));
    case 1:
      return ValueFunction::Saturating(uniform(rng, 0.5, 2.0), uniform(rng, 0.3, 3.0));
    default:
      return ValueFunction::Sqrt();
  }
}

RawInstance random_raw(int n, int m, std::mt19937_64& rng,
                       const std::function<ValueFunction()>& value,
                       const std::function<CostModel()>& cost) {
  const auto member = random_participation(n, m, rng);
  RawInstance raw;
  for (int j = 0; j < m; ++j) raw.projects.push_back({pid(j), value(), std::nullopt});
  for (int i = 0; i < n; ++i) {
    RawPlayer p;
    p.id = iid(i);
    p.cost = cost();
    for (int j = 0; j < m; ++j) {
      if (member[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
        p.projects.emplace_back(pid(j), EffortMap::Linear(uniform(rng, 0.5, 2.0)));
      }
    }
    raw.players.push_back(std::move(p));
  }
  return raw;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

Instance lower_bound_instance(int n, double alpha, double beta) {
  if (n < 2) throw InvalidInput("lower bound instance needs n >= 2");
  if (!(alpha > 1.0)) throw InvalidInput("lower bound instance needs alpha > 1");
  if (!(beta > 0.0)) throw InvalidInput("lower bound instance needs beta > 0");
  const double kappa = (n - 1.0) / (beta * n * n);
  RawInstance raw;
  raw.projects.push_back({pid(0), ValueFunction::Saturating(1.0, alpha), std::nullopt});
  for (int j = 1; j < n; ++j) {
    raw.projects.push_back({pid(j), ValueFunction::Saturating(kappa, beta), std::nullopt});
  }
  for (int i = 0; i < n; ++i) {
    RawPlayer p;
    p.id = iid(i);
    p.cost = CostModel::Budget(1.0);
    for (int j = 0; j < n; ++j) p.projects.emplace_back(pid(j), EffortMap::Identity());
    raw.players.push_back(std::move(p));
  }
  return validate_instance(raw);
}

LowerBoundPrediction lower_bound_prediction(int n, double alpha, double beta) {
  LowerBoundPrediction p;
  const double share = 1.0 - 1.0 / n;
  const double sat = -std::expm1(-beta) / beta;
  p.eq_welfare = -std::expm1(-alpha * n);
  p.opt_lower_bound = -std::expm1(-alpha) + share * share * sat;
  p.ratio = 1.0 + share * share * sat;
  p.ratio_limit = 1.0 + share * share;
  return p;
}

QualityProfile lower_bound_witness(const Instance& inst) {
  QualityProfile q(inst);
  for (int i = 0; i < inst.num_players(); ++i) q.set(inst, i, i, 1.0);
  return q;
}

Instance linear_cost_instance(int n) {
  if (n < 1) throw InvalidInput("linear cost instance needs n >= 1");
  RawInstance raw;
  raw.projects.push_back({pid(0), ValueFunction::Sqrt(), std::nullopt});
  for (int i = 0; i < n; ++i) {
    RawPlayer p;
    p.id = iid(i);
    p.cost = CostModel::Linear();
    p.projects.emplace_back(pid(0), EffortMap::Identity());
    raw.players.push_back(std::move(p));
  }
  return validate_instance(raw);
}

double linear_cost_poa(int n) {
  if (n < 1) throw InvalidInput("n must be >= 1");
  return static_cast<double>(n) * n / (2.0 * n - 1.0);
}

SoftBounds soft_budget_bounds(double mu) {
  if (!(mu > 0.0)) {
    throw InvalidInput("soft budget bounds need mu > 0; linear costs have none");
  }
  if (std::isinf(mu)) return {0.5, 0.5};
  return {mu / (1.0 + 2.0 * mu), mu / (2.0 * (1.0 + mu))};
}

NonmonotoneBound nonmonotone_poa_bound(const ValueFunction& vf, int n) {
  if (vf.kind() != ValueFunction::Kind::kSinglePeaked) {
    throw InvalidInput("nonmonotone bound needs a single-peaked value");
  }
  NonmonotoneBound b;
  b.bound = n / -vf.derivative(1.0);
  b.q_eq = symmetric_single_project_eq(vf, CostModel::Budget(1.0), n);
  b.q_opt = 0.5;
  b.realized_poa = vf.of_total(b.q_opt) / vf.of_total(b.q_eq);
  b.eq_above = b.q_eq >= 1.0 - 1.0 / n;
  return b;
}

double welfare_plus_production_slack(const Instance& inst,
                                     const QualityProfile& eq, double opt) {
  const ProductionCost pc = production_and_cost(eq, inst);
  return (pc.production - pc.cost) + pc.production - opt;
}

std::string poa_csv_header() {
  return "instance,rule,n,param,eq_welfare,opt_welfare,ratio,predicted,bound,pass";
}

std::string to_csv_row(const PoaReport& r) {
  std::ostringstream os;
  os << r.instance << ',' << r.rule << ',' << r.n << ',' << fmt(r.param) << ','
     << fmt(r.eq_welfare) << ',' << fmt(r.opt_welfare) << ',' << fmt(r.ratio)
     << ',' << fmt(r.predicted) << ',' << fmt(r.bound) << ','
     << (r.pass ? "true" : "false");
  return os.str();
}

Instance random_constant_elasticity_instance(double alpha, std::mt19937_64& rng,
                                             int max_players, int max_projects) {
  const int n = std::uniform_int_distribution<int>(2, std::max(2, max_players))(rng);
  const int m = std::uniform_int_distribution<int>(1, std::max(1, max_projects))(rng);
  RawInstance raw = random_raw(
      n, m, rng,
      [&] { return ValueFunction::Power(uniform(rng, 0.5, 2.0), alpha); },
      [&] { return CostModel::Budget(uniform(rng, 0.5, 2.0)); });
  return validate_instance(raw);
}

Instance random_submodular_instance(ValueFamily family, const SharingRule& rule,
                                    std::mt19937_64& rng, int max_players,
                                    int max_projects) {
  const int n = std::uniform_int_distribution<int>(2, std::max(2, max_players))(rng);
  const int m = std::uniform_int_distribution<int>(1, std::max(1, max_projects))(rng);
  RawInstance raw = random_raw(
      n, m, rng,
      [&] {
        return family == ValueFamily::kMaxQuality ? ValueFunction::MaxQuality()
                                                  : random_concave_value(rng);
      },
      [&] { return CostModel::Budget(uniform(rng, 0.5, 2.0)); });
  raw.sharing = rule;
  return validate_instance(raw);
}

Instance random_soft_cost_instance(double mu, std::mt19937_64& rng,
                                   int max_players, int max_projects) {
  const int n = std::uniform_int_distribution<int>(2, std::max(2, max_players))(rng);
  const int m = std::uniform_int_distribution<int>(1, std::max(1, max_projects))(rng);
  RawInstance raw = random_raw(
      n, m, rng, [&] { return random_concave_value(rng); },
      [&] { return CostModel::Power(uniform(rng, 0.5, 2.0), mu); });
  return validate_instance(raw);
}

}  // namespace collab
