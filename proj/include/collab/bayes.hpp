#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "collab/solvers.hpp"

namespace collab {

/// A concrete player type: cost model and one effort map per participated
/// project, in the player's edge order.
struct ConcreteType {
  CostModel cost;
  std::vector<EffortMap> maps;
};

struct TypePoint {
  double prob = 1.0;
  ConcreteType type;
};

/// Independent finite type distributions, one support list per player.
struct TypeDistribution {
  std::vector<std::vector<TypePoint>> players;

  /// Probabilities sum to 1 within 1e-12 and every type fits the
  /// instance's participation structure.
  void validate(const Instance& inst) const;
};

/// Every player's current type with probability 1.
TypeDistribution degenerate_distribution(const Instance& inst);

/// The `types` blocks of the instance description; players without one get
/// their listed type with probability 1.
TypeDistribution distribution_from_instance(const Instance& inst);

/// Support index per player.
std::vector<int> sample_type_profile(const TypeDistribution& dists,
                                     std::mt19937_64& rng);
std::vector<int> sample_type_profile(const TypeDistribution& dists,
                                     std::uint64_t seed);

Instance instantiate(const Instance& inst, const TypeDistribution& dists,
                     const std::vector<int>& types);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo mean of OPT(t) over sampled type profiles.
Estimate expected_opt(const Instance& inst, const TypeDistribution& dists,
                      int samples, std::uint64_t seed,
                      const SolverConfig& config = {});

/// E[OPT(t)] by enumerating the product support.
double exact_expected_opt(const Instance& inst, const TypeDistribution& dists,
                          const SolverConfig& config = {});

struct BayesLearningResult {
  /// Mean welfare over the last half of the rounds.
  double tail_welfare = 0.0;
  double average_welfare = 0.0;
  /// Per player, per support type: average external regret over the
  /// rounds where that type was drawn, clamped at 0.
  std::vector<std::vector<double>> regret;
  LearningTrace trace;
};

/// Repeated play with freshly drawn types every round. Each (player, type)
/// pair runs its own online gradient learner, updated only on rounds where
/// that type is drawn.
BayesLearningResult bayes_learning_welfare(const Instance& inst,
                                           const TypeDistribution& dists,
                                           int rounds, std::uint64_t seed,
                                           const SolverConfig& config = {});

}  // namespace collab
