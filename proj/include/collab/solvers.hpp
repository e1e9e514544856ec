#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "collab/instance.hpp"

namespace collab {

struct SolverConfig {
  int max_iters = 10000;
  double tol_q = 1e-8;        // max coordinate change between rounds
  double tol_u = 1e-10;       // utility improvement tolerance
  double inner_tol = 1e-12;   // 1-D stationarity solves
  int horizon = 50000;        // learning rounds
  double step_scale = 0.1;    // eta_0 = step_scale * B_i (hard) or step_scale
  std::uint64_t seed = 0;
  bool random_order = false;  // BR dynamics player order
  /// Allows best responses for rules whose share is not concave in the own
  /// quality (pairwise golden-section search).
  bool allow_fallback = false;
  /// Profiles kept in a learning trace; 0 keeps about 200.
  int trace_samples = 0;

  void validate() const;
};

struct EquilibriumResult {
  QualityProfile profile;
  bool converged = false;
  int iterations = 0;
  double welfare = 0.0;
  Vector utilities;
  /// max_i u_i(BR_i, q_-i) - u_i(q), clamped at 0.
  double max_gain = 0.0;
  double last_change = 0.0;
};

struct LearningTrace {
  int horizon = 0;
  std::vector<int> sample_rounds;
  std::vector<QualityProfile> samples;
  /// Mean of per-round welfare over all rounds.
  double average_welfare = 0.0;
  /// Mean over the last half of the rounds.
  double tail_welfare = 0.0;
  Vector average_profile;  // time-averaged quality per edge
  /// External regret per player against the best fixed action in
  /// hindsight, clamped at 0 and divided by the horizon.
  Vector regret;
};

struct OptResult {
  QualityProfile profile;
  double value = 0.0;
  /// ||q - P(q + grad)||_inf at the returned profile.
  double kkt_residual = 0.0;
  bool certified = false;
};

/// Player i's best response to the rest of the profile.
Vector best_response(const Instance& inst, const QualityProfile& profile,
                     int player, const SolverConfig& config = {});

/// u_i(BR_i, q_-i) - u_i(q).
double best_response_gain(const Instance& inst, const QualityProfile& profile,
                          int player, const SolverConfig& config = {});

/// Round-robin best responses from init (uniform split when absent).
EquilibriumResult br_dynamics(const Instance& inst,
                              const SolverConfig& config = {},
                              std::optional<QualityProfile> init = {});

/// Every player runs online projected gradient ascent with eta_t =
/// eta_0 / sqrt(t).
LearningTrace no_regret_play(const Instance& inst,
                             const SolverConfig& config = {});

/// Welfare maximum by projected gradient ascent from 5 seeded starts,
/// polished by exact per-player block ascent. Requires sum-based values
/// unless the instance has a single project.
OptResult solve_opt(const Instance& inst, const SolverConfig& config = {});

/// Exhaustive grid search used as an oracle for solve_opt. Hard budgets:
/// every player's budget spread over their projects in steps of B/(k-1).
/// Soft costs: qualities on a k-point grid on [0, q_cap].
OptResult brute_force_opt(const Instance& inst, int k);

/// Euclidean projection of one player's qualities onto their feasible set.
Vector project_player(const Instance& inst, int player, const VectorRef& q);

/// Gradient of each player's own utility with respect to their qualities,
/// stacked per edge.
Vector utility_gradient(const Instance& inst, const QualityProfile& profile);

/// Gradient of social welfare, per edge.
Vector welfare_gradient(const Instance& inst, const QualityProfile& profile);

/// Total quality at a symmetric equilibrium of a single project under
/// proportional sharing with identity maps: root of
/// v'(X) - c'(X/n) + (1 - 1/n)(v(X) - v'(X) X)/X. Hard budgets use c' = 0.
double symmetric_single_project_eq(const ValueFunction& vf,
                                   const CostModel& cost, int n);

/// Total quality maximizing welfare in the same setting: v'(X) = c'(X/n).
double symmetric_single_project_opt(const ValueFunction& vf,
                                    const CostModel& cost, int n);

}  // namespace collab
