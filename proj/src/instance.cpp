#include "collab/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "collab/errors.hpp"

namespace collab {

bool Instance::all_hard_budget() const {
  return std::all_of(players_.begin(), players_.end(),
                     [](const Player& p) { return p.cost.is_hard(); });
}

bool Instance::all_soft_cost() const {
  return std::none_of(players_.begin(), players_.end(),
                      [](const Player& p) { return p.cost.is_hard(); });
}

bool Instance::all_sum_based() const {
  return std::all_of(projects_.begin(), projects_.end(),
                     [](const Project& p) { return p.value.sum_based(); });
}

int Instance::player_index(const std::string& id) const {
  for (int i = 0; i < num_players(); ++i) {
    if (players_[i].id == id) return i;
  }
  throw InvalidInput("unknown player '" + id + "'");
}

int Instance::project_index(const std::string& id) const {
  for (int j = 0; j < num_projects(); ++j) {
    if (projects_[j].id == id) return j;
  }
  throw InvalidInput("unknown project '" + id + "'");
}

int Instance::edge_index(int player, int project) const {
  for (int e : players_.at(player).edges) {
    if (edges_[e].project == project) return e;
  }
  return -1;
}

Instance Instance::with_player_type(int player, const CostModel& cost,
                                    const std::vector<EffortMap>& maps) const {
  Instance out = *this;
  Player& p = out.players_.at(player);
  if (maps.size() != p.edges.size()) {
    throw InvalidInput("type for player '" + p.id +
                       "' has the wrong number of effort maps");
  }
  cost.validate();
  p.cost = cost;
  for (std::size_t s = 0; s < maps.size(); ++s) {
    maps[s].validate();
    out.edges_[p.edges[s]].map = maps[s];
  }
  return out;
}

Instance Instance::with_epsilon_floor(double floor) const {
  if (!(floor >= 0.0)) throw InvalidInput("epsilon floor must be >= 0");
  Instance out = *this;
  out.epsilon_floor_ = floor;
  out.raw_.epsilon_floor = floor;
  return out;
}

Instance Instance::with_sharing(const SharingRule& rule) const {
  rule.validate();
  Instance out = *this;
  for (Project& p : out.projects_) p.sharing = rule;
  out.raw_.sharing = rule;
  for (RawProject& p : out.raw_.projects) p.sharing.reset();
  return out;
}

Instance validate_instance(const RawInstance& raw) {
  Instance inst;
  inst.raw_ = raw;

  std::map<std::string, int> project_ids;
  for (const RawProject& rp : raw.projects) {
    if (rp.id.empty()) throw InvalidInput("project id must be nonempty");
    if (!project_ids.emplace(rp.id, static_cast<int>(inst.projects_.size()))
             .second) {
      throw InvalidInput("duplicate project id '" + rp.id + "'");
    }
    const SharingRule rule = rp.sharing.value_or(raw.sharing);
    rule.validate();
    inst.projects_.push_back(Project{rp.id, rp.value, rule, {}});
  }

  std::set<std::string> player_ids;
  for (const RawPlayer& rp : raw.players) {
    if (rp.id.empty()) throw InvalidInput("player id must be nonempty");
    if (!player_ids.insert(rp.id).second) {
      throw InvalidInput("duplicate player id '" + rp.id + "'");
    }
    rp.cost.validate();
    if (rp.projects.empty()) {
      throw InvalidInput("player '" + rp.id + "' participates in no project");
    }
    std::vector<std::pair<int, EffortMap>> links;
    std::set<int> seen;
    for (const auto& [pid, map] : rp.projects) {
      auto it = project_ids.find(pid);
      if (it == project_ids.end()) {
        throw InvalidInput("unknown project '" + pid + "' for player '" +
                           rp.id + "'");
      }
      if (!seen.insert(it->second).second) {
        throw InvalidInput("player '" + rp.id + "' lists project '" + pid +
                           "' twice");
      }
      map.validate();
      links.emplace_back(it->second, map);
    }
    std::sort(links.begin(), links.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const int player = static_cast<int>(inst.players_.size());
    Player p{rp.id, rp.cost, {}};
    for (const auto& [j, map] : links) {
      Edge e;
      e.player = player;
      e.project = j;
      e.player_slot = static_cast<int>(p.edges.size());
      e.map = map;
      p.edges.push_back(static_cast<int>(inst.edges_.size()));
      inst.edges_.push_back(e);
    }
    inst.players_.push_back(std::move(p));
  }

  // Edges were created player by player, so each project's list comes out
  // in ascending player order.
  for (int e = 0; e < inst.num_edges(); ++e) {
    Edge& edge = inst.edges_[e];
    Project& proj = inst.projects_[edge.project];
    edge.project_slot = static_cast<int>(proj.edges.size());
    proj.edges.push_back(e);
  }
  for (const Project& proj : inst.projects_) {
    if (proj.edges.empty()) {
      throw InvalidInput("project '" + proj.id + "' has no participants");
    }
    if (proj.sharing.kind == SharingRule::Kind::kRanking &&
        !proj.sharing.coefficients.empty() &&
        proj.sharing.coefficients.size() != proj.edges.size()) {
      throw InvalidInput("ranking coefficients for project '" + proj.id +
                         "' do not match its participant count");
    }
  }

  if (raw.epsilon_floor) {
    if (!(*raw.epsilon_floor >= 0.0)) {
      throw InvalidInput("epsilon_floor must be >= 0");
    }
    inst.epsilon_floor_ = *raw.epsilon_floor;
  }
  return inst;
}

double QualityProfile::at(const Instance& inst, int player,
                          int project) const {
  const int e = inst.edge_index(player, project);
  if (e < 0) throw InvalidInput("player does not participate in project");
  return q_[e];
}

void QualityProfile::set(const Instance& inst, int player, int project,
                         double q) {
  const int e = inst.edge_index(player, project);
  if (e < 0) throw InvalidInput("player does not participate in project");
  if (q < 0.0) throw InvalidInput("quality must be nonnegative");
  q_[e] = q;
}

Vector project_qualities(const Instance& inst, const QualityProfile& p,
                         int project) {
  const auto& edges = inst.project(project).edges;
  Vector q(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) q[k] = p[edges[k]];
  return q;
}

Vector player_qualities(const Instance& inst, const QualityProfile& p,
                        int player) {
  const auto& edges = inst.player(player).edges;
  Vector q(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) q[k] = p[edges[k]];
  return q;
}

void set_player_qualities(const Instance& inst, QualityProfile& p, int player,
                          const VectorRef& q) {
  const auto& edges = inst.player(player).edges;
  if (static_cast<std::size_t>(q.size()) != edges.size()) {
    throw InvalidInput("quality vector size does not match participation");
  }
  for (std::size_t k = 0; k < edges.size(); ++k) p[edges[k]] = q[k];
}

double project_total(const Instance& inst, const QualityProfile& p,
                     int project) {
  double total = 0.0;
  for (int e : inst.project(project).edges) total += p[e];
  return total;
}

double total_effort(const Instance& inst, const QualityProfile& p,
                    int player) {
  double x = 0.0;
  for (int e : inst.player(player).edges) x += inst.edge(e).map.effort(p[e]);
  return x;
}

FeasibilityReport is_feasible(const QualityProfile& p, const Instance& inst) {
  FeasibilityReport report;
  if (p.size() != inst.num_edges()) {
    throw InvalidInput("profile does not match the instance participation");
  }
  for (Eigen::Index e = 0; e < p.size(); ++e) {
    if (p[e] < 0.0 || !std::isfinite(p[e])) report.feasible = false;
  }
  for (int i = 0; i < inst.num_players(); ++i) {
    const Player& pl = inst.player(i);
    if (!pl.cost.is_hard()) {
      report.slack.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    double effort = 0.0;
    for (int e : pl.edges) effort += inst.edge(e).map.effort(std::max(p[e], 0.0));
    const double slack = pl.cost.budget - effort;
    report.slack.push_back(slack);
    if (slack < -kBudgetTolerance) report.feasible = false;
  }
  return report;
}

namespace {

bool floored(const Instance& inst, const Project& proj, double total) {
  return inst.epsilon_floor() > 0.0 && proj.value.sum_based() &&
         total < inst.epsilon_floor();
}

}  // namespace

double project_value(const Instance& inst, const QualityProfile& p,
                     int project) {
  const Project& proj = inst.project(project);
  if (proj.value.sum_based()) {
    return proj.value.of_total(
        std::max(project_total(inst, p, project), inst.epsilon_floor()));
  }
  return proj.value(project_qualities(inst, p, project));
}

ShareVector project_shares(const Instance& inst, const QualityProfile& p,
                           int project) {
  const Project& proj = inst.project(project);
  const Vector q = project_qualities(inst, p, project);
  const double total = q.sum();
  const bool fixed_portions = proj.sharing.kind == SharingRule::Kind::kRanking &&
                              !proj.sharing.coefficients.empty();
  if (!floored(inst, proj, total) || fixed_portions) {
    return shares(proj.sharing, proj.value, q);
  }
  if (proj.sharing.kind == SharingRule::Kind::kProportional) {
    return q * proj.value.average(inst.epsilon_floor());
  }
  // An exclusive participant tops the total up to the floor and keeps its
  // own share.
  Vector extended(q.size() + 1);
  extended << q, inst.epsilon_floor() - total;
  return shares(proj.sharing, proj.value, extended).head(q.size());
}

double player_utility(const Instance& inst, const QualityProfile& p,
                      int player) {
  const Player& pl = inst.player(player);
  double u = 0.0;
  for (int e : pl.edges) {
    const Edge& edge = inst.edge(e);
    u += project_shares(inst, p, edge.project)[edge.project_slot];
  }
  if (!pl.cost.is_hard()) u -= pl.cost.cost(total_effort(inst, p, player));
  return u;
}

Vector player_utilities(const Instance& inst, const QualityProfile& p) {
  Vector u = Vector::Zero(inst.num_players());
  for (int j = 0; j < inst.num_projects(); ++j) {
    const ShareVector s = project_shares(inst, p, j);
    const auto& edges = inst.project(j).edges;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      u[inst.edge(edges[k]).player] += s[k];
    }
  }
  for (int i = 0; i < inst.num_players(); ++i) {
    const Player& pl = inst.player(i);
    if (!pl.cost.is_hard()) u[i] -= pl.cost.cost(total_effort(inst, p, i));
  }
  return u;
}

ProductionCost production_and_cost(const QualityProfile& p,
                                   const Instance& inst) {
  ProductionCost out;
  for (int j = 0; j < inst.num_projects(); ++j) {
    out.production += project_value(inst, p, j);
  }
  out.hard_budget = inst.all_hard_budget();
  for (int i = 0; i < inst.num_players(); ++i) {
    const Player& pl = inst.player(i);
    if (!pl.cost.is_hard()) out.cost += pl.cost.cost(total_effort(inst, p, i));
  }
  return out;
}

double social_welfare(const QualityProfile& p, const Instance& inst) {
  if (!is_feasible(p, inst).feasible) {
    throw InvalidInput("profile violates a hard budget");
  }
  const ProductionCost pc = production_and_cost(p, inst);
  return pc.production - pc.cost;
}

QualityProfile uniform_profile(const Instance& inst) {
  QualityProfile p(inst);
  for (const Player& pl : inst.players()) {
    for (int e : pl.edges) {
      if (pl.cost.is_hard()) {
        p[e] = inst.edge(e).map.quality(pl.cost.budget /
                                        static_cast<double>(pl.edges.size()));
      } else {
        p[e] = 0.01;
      }
    }
  }
  return p;
}

}  // namespace collab
