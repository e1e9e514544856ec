#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "collab/value_function.hpp"

namespace collab {

/// Local rule that splits a project's value among its participants.
struct SharingRule {
  enum class Kind {
    kProportional,
    kMarginalProportional,
    kShapleyExact,
    kShapleySampled,
    kRanking,
    kWinnerTakeAll,
  };
  enum class RankOrder { kMarginalContribution, kQuality };

  Kind kind = Kind::kProportional;
  /// Permutations drawn by the sampled Shapley rule.
  int samples = 1000;
  std::uint64_t seed = 0;
  /// Explicit ranking portions a_1 >= ... >= a_n; empty means harmonic
  /// portions sized to each project.
  std::vector<double> coefficients;
  RankOrder order = RankOrder::kMarginalContribution;

  static SharingRule Proportional() { return {}; }
  static SharingRule MarginalProportional();
  static SharingRule ShapleyExact();
  static SharingRule ShapleySampled(int samples, std::uint64_t seed = 0);
  static SharingRule RankingHarmonic(RankOrder order = RankOrder::kMarginalContribution);
  static SharingRule Ranking(std::vector<double> coefficients,
                             RankOrder order = RankOrder::kMarginalContribution);
  static SharingRule WinnerTakeAll();

  /// Parses "proportional", "marginal_proportional", "shapley_exact",
  /// "shapley_sampled:S", "ranking_harmonic", "winner_take_all".
  static SharingRule Parse(const std::string& text);
  std::string name() const;

  void validate() const;

  /// True when each player's share is concave in their own quality with the
  /// others fixed and zero at zero, for the given value function.
  bool concave_for(const ValueFunction& vf) const;
  /// True when the rule is known to award at least the marginal contribution
  /// for the given value function.
  bool has_mc_property_for(const ValueFunction& vf) const;
};

/// Largest participant count accepted by exact Shapley enumeration.
inline constexpr int kShapleyExactLimit = 12;

using ShareVector = Vector;

ShareVector shares(const SharingRule& rule, const ValueFunction& vf,
                   const VectorRef& q);

enum class ShapleyMode { kExact, kSampled };
ShareVector shapley_shares(const ValueFunction& vf, const VectorRef& q,
                           ShapleyMode mode, int samples = 0,
                           std::uint64_t seed = 0);

Vector harmonic_coefficients(int n);

/// Positions 0..n-1 in ranking order: decreasing key, ties to lower index.
std::vector<int> ranking_order(const ValueFunction& vf, const VectorRef& q,
                               SharingRule::RankOrder order);

struct McEntry {
  double share = 0.0;
  double marginal = 0.0;
  double slack = 0.0;
};

struct McReport {
  std::vector<McEntry> entries;
  double min_slack = 0.0;
  bool holds = true;
};

McReport check_mc_property(const SharingRule& rule, const ValueFunction& vf,
                           const VectorRef& q, double tol = 1e-9);

/// max_i MC_i / (H_n * share_i) under the harmonic ranking rule ranked by
/// marginal contribution. Participants with zero marginal contribution are
/// skipped; the bound holds iff the result is <= 1 + 1e-9.
double ranking_approx_factor(const ValueFunction& vf, const VectorRef& q);

/// One player's share on one project as a function of their own quality,
/// with everyone else's submission frozen.
class OwnShareCurve {
 public:
  OwnShareCurve(const SharingRule& rule, const ValueFunction& vf,
                const VectorRef& q, Eigen::Index player,
                double epsilon_floor = 0.0);

  double value(double own) const;
  /// d share / d own. Analytic for concave rules on sum-based values,
  /// central differences otherwise.
  double derivative(double own) const;
  bool analytic() const { return mode_ != Mode::kGeneric; }

 private:
  enum class Mode { kProportional, kPredecessorSums, kGeneric };

  const SharingRule* rule_;
  const ValueFunction* vf_;
  Mode mode_ = Mode::kGeneric;
  double others_total_ = 0.0;
  double floor_ = 0.0;
  // Shapley on sum-based values: the share is the weighted mean of
  // v(P + own) - v(P) over predecessor totals P.
  std::vector<double> pred_totals_;
  std::vector<double> pred_weights_;
  Vector profile_;
  Eigen::Index player_;
};

}  // namespace collab
