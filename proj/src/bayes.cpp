#include "collab/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "collab/allocation.hpp"
#include "collab/errors.hpp"

namespace collab {
namespace {

constexpr int kRegretSnapshots = 2000;
constexpr int kTraceSamples = 200;
constexpr double kMaxSupportProduct = 4096;

ConcreteType current_type(const Instance& inst, int player) {
  ConcreteType t;
  t.cost = inst.player(player).cost;
  for (int e : inst.player(player).edges) t.maps.push_back(inst.edge(e).map);
  return t;
}

int draw(const std::vector<TypePoint>& support, std::mt19937_64& rng) {
  if (support.size() == 1) return 0;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < support.size(); ++k) {
    acc += support[k].prob;
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(support.size()) - 1;
}

Vector initial_action(const ConcreteType& t) {
  Vector q(static_cast<Eigen::Index>(t.maps.size()));
  for (std::size_t s = 0; s < t.maps.size(); ++s) {
    q[static_cast<Eigen::Index>(s)] =
        t.cost.is_hard()
            ? t.maps[s].quality(t.cost.budget / static_cast<double>(t.maps.size()))
            : 0.01;
  }
  return q;
}

struct Snapshot {
  std::vector<int> types;
  QualityProfile profile;
};

// Best fixed action in hindsight for one (player, type) against the stored
// opponent profiles, minus the realized average utility.
double hindsight_regret(const std::vector<const Instance*>& instances,
                        const std::vector<const QualityProfile*>& profiles,
                        int player, const SolverConfig& config) {
  if (profiles.empty()) return 0.0;
  const Instance& first = *instances.front();
  const Player& pl = first.player(player);
  const auto m = pl.edges.size();
  const double count = static_cast<double>(profiles.size());

  std::vector<std::vector<OwnShareCurve>> curves(m);
  double realized = 0.0;
  for (std::size_t r = 0; r < profiles.size(); ++r) {
    const Instance& inst = *instances[r];
    for (std::size_t s = 0; s < m; ++s) {
      const Edge& edge = inst.edge(pl.edges[s]);
      const Project& proj = inst.project(edge.project);
      curves[s].emplace_back(proj.sharing, proj.value,
                             project_qualities(inst, *profiles[r], edge.project),
                             edge.project_slot, inst.epsilon_floor());
    }
    realized += player_utility(inst, *profiles[r], player);
  }
  realized /= count;

  std::vector<AllocationCoordinate> coords(m);
  for (std::size_t s = 0; s < m; ++s) {
    const auto* list = &curves[s];
    coords[s].gain_derivative = [list, count](double q) {
      double d = 0.0;
      for (const OwnShareCurve& c : *list) d += c.derivative(q);
      return d / count;
    };
    coords[s].map = first.edge(pl.edges[s]).map;
    if (pl.cost.is_hard()) coords[s].upper = coords[s].map.quality(pl.cost.budget);
  }
  AllocationTolerances tol;
  tol.quality = config.inner_tol;
  const Vector best = pl.cost.is_hard()
                          ? allocate_budget(coords, pl.cost.budget, tol).q
                          : allocate_with_cost(coords, pl.cost, tol).q;
  double hindsight = 0.0;
  double effort = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const double q = best[static_cast<Eigen::Index>(s)];
    for (const OwnShareCurve& c : curves[s]) hindsight += c.value(q);
    effort += coords[s].map.effort(q);
  }
  hindsight /= count;
  if (!pl.cost.is_hard()) hindsight -= pl.cost.cost(effort);
  return std::max(0.0, hindsight - realized);
}

BayesLearningResult run_learning(const Instance& base,
                                 const TypeDistribution& dists, int rounds,
                                 std::uint64_t seed,
                                 const SolverConfig& config) {
  config.validate();
  if (rounds < 1) throw InvalidInput("learning needs at least one round");
  const Instance inst = base.epsilon_floor() > 0.0
                            ? base
                            : base.with_epsilon_floor(kDefaultEpsilonFloor);
  dists.validate(inst);
  const int n = inst.num_players();

  std::map<std::vector<int>, Instance> cache;
  auto instance_for = [&](const std::vector<int>& types) -> const Instance& {
    auto it = cache.find(types);
    if (it == cache.end()) {
      it = cache.emplace(types, instantiate(inst, dists, types)).first;
    }
    return it->second;
  };

  std::vector<std::vector<Vector>> action(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> updates(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> eta0(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (const TypePoint& tp : dists.players[static_cast<std::size_t>(i)]) {
      action[static_cast<std::size_t>(i)].push_back(initial_action(tp.type));
      updates[static_cast<std::size_t>(i)].push_back(0);
      eta0[static_cast<std::size_t>(i)].push_back(
          config.step_scale * (tp.type.cost.is_hard() ? tp.type.cost.budget : 1.0));
    }
  }

  std::mt19937_64 rng(seed);
  const int snapshot_stride = std::max(1, rounds / kRegretSnapshots);
  const int wanted = config.trace_samples > 0 ? config.trace_samples : kTraceSamples;
  const int trace_stride = std::max(1, rounds / wanted);
  std::vector<Snapshot> snapshots;

  BayesLearningResult out;
  LearningTrace& trace = out.trace;
  trace.horizon = rounds;
  trace.average_profile = Vector::Zero(inst.num_edges());
  double total = 0.0;
  double tail = 0.0;
  const int tail_start = rounds / 2 + 1;

  for (int t = 1; t <= rounds; ++t) {
    const std::vector<int> types = sample_type_profile(dists, rng);
    const Instance& cur = instance_for(types);
    QualityProfile q(cur);
    for (int i = 0; i < n; ++i) {
      set_player_qualities(cur, q, i,
                           action[static_cast<std::size_t>(i)]
                                 [static_cast<std::size_t>(types[static_cast<std::size_t>(i)])]);
    }
    const ProductionCost pc = production_and_cost(q, cur);
    const double w = pc.production - pc.cost;
    total += w;
    if (t >= tail_start) tail += w;
    trace.average_profile += q.values();
    if (t % trace_stride == 0) {
      trace.sample_rounds.push_back(t);
      trace.samples.push_back(q);
    }
    if (t % snapshot_stride == 0) snapshots.push_back({types, q});

    const Vector g = utility_gradient(cur, q);
    for (int i = 0; i < n; ++i) {
      const auto tau = static_cast<std::size_t>(types[static_cast<std::size_t>(i)]);
      auto& x = action[static_cast<std::size_t>(i)][tau];
      const int k = ++updates[static_cast<std::size_t>(i)][tau];
      const double eta = eta0[static_cast<std::size_t>(i)][tau] / std::sqrt(k);
      const auto& edges = cur.player(i).edges;
      Vector step = x;
      for (std::size_t s = 0; s < edges.size(); ++s) {
        step[static_cast<Eigen::Index>(s)] += eta * g[edges[s]];
      }
      x = project_player(cur, i, step);
    }
  }

  trace.average_welfare = total / rounds;
  trace.tail_welfare = tail / (rounds - tail_start + 1);
  trace.average_profile /= rounds;
  out.average_welfare = trace.average_welfare;
  out.tail_welfare = trace.tail_welfare;

  out.regret.resize(static_cast<std::size_t>(n));
  trace.regret = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const auto& support = dists.players[static_cast<std::size_t>(i)];
    for (std::size_t tau = 0; tau < support.size(); ++tau) {
      std::vector<const Instance*> insts;
      std::vector<const QualityProfile*> profiles;
      for (const Snapshot& s : snapshots) {
        if (s.types[static_cast<std::size_t>(i)] != static_cast<int>(tau)) continue;
        insts.push_back(&instance_for(s.types));
        profiles.push_back(&s.profile);
      }
      const double r = hindsight_regret(insts, profiles, i, config);
      out.regret[static_cast<std::size_t>(i)].push_back(r);
      trace.regret[i] = std::max(trace.regret[i], r);
    }
  }
  return out;
}

}  // namespace

void TypeDistribution::validate(const Instance& inst) const {
  if (static_cast<int>(players.size()) != inst.num_players()) {
    throw InvalidInput("type distribution does not cover every player");
  }
  for (int i = 0; i < inst.num_players(); ++i) {
    const auto& support = players[static_cast<std::size_t>(i)];
    const std::string& id = inst.player(i).id;
    if (support.empty()) throw InvalidInput("player '" + id + "' has no types");
    double sum = 0.0;
    for (const TypePoint& tp : support) {
      if (!(tp.prob >= 0.0)) throw InvalidInput("type probabilities must be >= 0");
      if (tp.type.maps.size() != inst.player(i).edges.size()) {
        throw InvalidInput("a type of player '" + id +
                           "' does not match their participation");
      }
      tp.type.cost.validate();
      for (const EffortMap& m : tp.type.maps) m.validate();
      sum += tp.prob;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw InvalidInput("type probabilities of player '" + id +
                         "' do not sum to 1");
    }
  }
}

TypeDistribution degenerate_distribution(const Instance& inst) {
  TypeDistribution d;
  for (int i = 0; i < inst.num_players(); ++i) {
    d.players.push_back({TypePoint{1.0, current_type(inst, i)}});
  }
  return d;
}

TypeDistribution distribution_from_instance(const Instance& inst) {
  TypeDistribution d;
  const RawInstance& raw = inst.raw();
  for (int i = 0; i < inst.num_players(); ++i) {
    const Player& pl = inst.player(i);
    const auto it = std::find_if(raw.players.begin(), raw.players.end(),
                                 [&](const RawPlayer& rp) { return rp.id == pl.id; });
    if (it == raw.players.end() || it->types.empty()) {
      d.players.push_back({TypePoint{1.0, current_type(inst, i)}});
      continue;
    }
    std::vector<TypePoint> support;
    for (const RawType& rt : it->types) {
      TypePoint tp;
      tp.prob = rt.prob;
      tp.type.cost = rt.cost;
      for (int e : pl.edges) {
        const std::string& pid = inst.project(inst.edge(e).project).id;
        const auto m = std::find_if(rt.maps.begin(), rt.maps.end(),
                                    [&](const auto& kv) { return kv.first == pid; });
        tp.type.maps.push_back(m == rt.maps.end() ? inst.edge(e).map : m->second);
      }
      support.push_back(std::move(tp));
    }
    d.players.push_back(std::move(support));
  }
  d.validate(inst);
  return d;
}

std::vector<int> sample_type_profile(const TypeDistribution& dists,
                                     std::mt19937_64& rng) {
  std::vector<int> t;
  t.reserve(dists.players.size());
  for (const auto& support : dists.players) t.push_back(draw(support, rng));
  return t;
}

std::vector<int> sample_type_profile(const TypeDistribution& dists,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_type_profile(dists, rng);
}

Instance instantiate(const Instance& inst, const TypeDistribution& dists,
                     const std::vector<int>& types) {
  if (types.size() != dists.players.size()) {
    throw InvalidInput("type profile does not cover every player");
  }
  Instance out = inst;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto& support = dists.players[i];
    if (types[i] < 0 || types[i] >= static_cast<int>(support.size())) {
      throw InvalidInput("type index out of range");
    }
    const ConcreteType& t = support[static_cast<std::size_t>(types[i])].type;
    out = out.with_player_type(static_cast<int>(i), t.cost, t.maps);
  }
  return out;
}

Estimate expected_opt(const Instance& inst, const TypeDistribution& dists,
                      int samples, std::uint64_t seed,
                      const SolverConfig& config) {
  if (samples < 1) throw InvalidInput("expected_opt needs at least one sample");
  dists.validate(inst);
  std::mt19937_64 rng(seed);
  std::map<std::vector<int>, double> solved;
  // Welford updates: a degenerate distribution returns OPT exactly.
  Estimate e;
  double m2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const std::vector<int> t = sample_type_profile(dists, rng);
    auto it = solved.find(t);
    if (it == solved.end()) {
      it = solved.emplace(t, solve_opt(instantiate(inst, dists, t), config).value)
               .first;
    }
    const double delta = it->second - e.mean;
    e.mean += delta / (s + 1);
    m2 += delta * (it->second - e.mean);
  }
  if (samples > 1) e.std_error = std::sqrt(m2 / (samples - 1) / samples);
  return e;
}

double exact_expected_opt(const Instance& inst, const TypeDistribution& dists,
                          const SolverConfig& config) {
  dists.validate(inst);
  double product = 1.0;
  for (const auto& support : dists.players) product *= static_cast<double>(support.size());
  if (product > kMaxSupportProduct) {
    throw InvalidInput("type support too large to enumerate; use expected_opt");
  }
  const std::size_t n = dists.players.size();
  std::vector<int> t(n, 0);
  double mean = 0.0;
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      p *= dists.players[i][static_cast<std::size_t>(t[i])].prob;
    }
    if (p > 0.0) mean += p * solve_opt(instantiate(inst, dists, t), config).value;
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++t[i] < static_cast<int>(dists.players[i].size())) break;
      t[i] = 0;
    }
    if (i == n) break;
  }
  return mean;
}

BayesLearningResult bayes_learning_welfare(const Instance& inst,
                                           const TypeDistribution& dists,
                                           int rounds, std::uint64_t seed,
                                           const SolverConfig& config) {
  return run_learning(inst, dists, rounds, seed, config);
}

LearningTrace no_regret_play(const Instance& inst, const SolverConfig& config) {
  return run_learning(inst, degenerate_distribution(inst), config.horizon,
                      config.seed, config)
      .trace;
}

}  // namespace collab
