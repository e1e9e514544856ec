#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "collab/sharing.hpp"
#include "collab/value_function.hpp"

namespace collab {

/// One support point of a player's private type: a cost model and effort
/// maps keyed by project id.
struct RawType {
  double prob = 1.0;
  CostModel cost;
  std::vector<std::pair<std::string, EffortMap>> maps;
};

struct RawPlayer {
  std::string id;
  CostModel cost;
  std::vector<std::pair<std::string, EffortMap>> projects;
  std::vector<RawType> types;  // optional type distribution
};

struct RawProject {
  std::string id;
  ValueFunction value;
  std::optional<SharingRule> sharing;
};

/// Unvalidated instance description, as read from the text format.
struct RawInstance {
  std::vector<RawPlayer> players;
  std::vector<RawProject> projects;
  SharingRule sharing;
  std::optional<double> epsilon_floor;
};

/// A (player, project) participation pair. Profiles store one quality per
/// edge.
struct Edge {
  int player = 0;
  int project = 0;
  int player_slot = 0;   // position inside the player's edge list
  int project_slot = 0;  // position inside the project's participant list
  EffortMap map;
};

struct Player {
  std::string id;
  CostModel cost;
  std::vector<int> edges;  // ascending project index
};

struct Project {
  std::string id;
  ValueFunction value;
  SharingRule sharing;
  std::vector<int> edges;  // ascending player index
};

/// Validated game: players, projects and the bipartite participation index.
/// Immutable once built.
class Instance {
 public:
  const std::vector<Player>& players() const { return players_; }
  const std::vector<Project>& projects() const { return projects_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Player& player(int i) const { return players_.at(i); }
  const Project& project(int j) const { return projects_.at(j); }
  const Edge& edge(int e) const { return edges_.at(e); }

  int num_players() const { return static_cast<int>(players_.size()); }
  int num_projects() const { return static_cast<int>(projects_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Minimum evaluated project total; 0 when the floor is disabled.
  double epsilon_floor() const { return epsilon_floor_; }
  bool all_hard_budget() const;
  bool all_soft_cost() const;
  bool all_sum_based() const;

  int player_index(const std::string& id) const;
  int project_index(const std::string& id) const;
  /// Edge index for (player, project) or -1.
  int edge_index(int player, int project) const;

  /// Copy with one player's cost model and per-edge maps replaced.
  Instance with_player_type(int player, const CostModel& cost,
                            const std::vector<EffortMap>& maps) const;
  Instance with_epsilon_floor(double floor) const;
  Instance with_sharing(const SharingRule& rule) const;

  const RawInstance& raw() const { return raw_; }

 private:
  friend Instance validate_instance(const RawInstance& raw);

  std::vector<Player> players_;
  std::vector<Project> projects_;
  std::vector<Edge> edges_;
  double epsilon_floor_ = 0.0;
  RawInstance raw_;
};

/// Checks ids, parameters and participation, and builds both indices.
Instance validate_instance(const RawInstance& raw);

/// Default floor used when the floor is switched on without a value.
inline constexpr double kDefaultEpsilonFloor = 1e-9;
/// Absolute slack allowed on hard budgets.
inline constexpr double kBudgetTolerance = 1e-9;

/// Joint action: one nonnegative quality per participation edge.
class QualityProfile {
 public:
  QualityProfile() = default;
  explicit QualityProfile(const Instance& inst)
      : q_(Vector::Zero(inst.num_edges())) {}
  explicit QualityProfile(Vector q) : q_(std::move(q)) {}

  double operator[](int e) const { return q_[e]; }
  double& operator[](int e) { return q_[e]; }
  const Vector& values() const { return q_; }
  Vector& values() { return q_; }
  Eigen::Index size() const { return q_.size(); }

  double at(const Instance& inst, int player, int project) const;
  void set(const Instance& inst, int player, int project, double q);

 private:
  Vector q_;
};

Vector project_qualities(const Instance& inst, const QualityProfile& p,
                         int project);
Vector player_qualities(const Instance& inst, const QualityProfile& p,
                        int player);
void set_player_qualities(const Instance& inst, QualityProfile& p, int player,
                          const VectorRef& q);
double project_total(const Instance& inst, const QualityProfile& p,
                     int project);
double total_effort(const Instance& inst, const QualityProfile& p, int player);

struct FeasibilityReport {
  bool feasible = true;
  /// B_i - sum of efforts for hard-budget players; NaN for soft-cost ones.
  std::vector<double> slack;
};

FeasibilityReport is_feasible(const QualityProfile& p, const Instance& inst);

/// v_j at the profile, honouring the epsilon floor.
double project_value(const Instance& inst, const QualityProfile& p,
                     int project);
/// Shares of project j in participant order, honouring the epsilon floor.
ShareVector project_shares(const Instance& inst, const QualityProfile& p,
                           int project);

double player_utility(const Instance& inst, const QualityProfile& p,
                      int player);
Vector player_utilities(const Instance& inst, const QualityProfile& p);

/// Total value minus total cost. Throws InvalidInput on a profile that
/// breaks a hard budget.
double social_welfare(const QualityProfile& p, const Instance& inst);

struct ProductionCost {
  double production = 0.0;
  double cost = 0.0;
  bool hard_budget = false;  // cost is reported as 0 for hard budgets
};

ProductionCost production_and_cost(const QualityProfile& p,
                                   const Instance& inst);

/// Uniform split of each hard budget across the player's projects; 0.01 on
/// every pair for soft-cost players.
QualityProfile uniform_profile(const Instance& inst);

}  // namespace collab
