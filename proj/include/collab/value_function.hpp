#pragma once

#include <string>

#include <Eigen/Dense>

namespace collab {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Effort needed to submit a given quality: the convex inverse of the
/// player's quality-of-effort map.
///
/// Two families are supported. `kLinearAbility` is x(q) = q / a for an
/// ability factor a > 0. `kPowerConvex` is x(q) = c * q^p with p >= 1 and
/// scale c > 0.
struct EffortMap {
  enum class Kind { kLinearAbility, kPowerConvex };

  Kind kind = Kind::kLinearAbility;
  double ability = 1.0;
  double exponent = 1.0;
  double scale = 1.0;

  static EffortMap Linear(double ability);
  static EffortMap Power(double scale, double exponent);
  static EffortMap Identity() { return Linear(1.0); }

  double effort(double quality) const;
  double quality(double effort) const;
  /// dx/dq at the given quality.
  double marginal_effort(double quality) const;

  void validate() const;
};

double effort_of_quality(const EffortMap& map, double quality);
double quality_of_effort(const EffortMap& map, double effort);

/// Either a hard bound on total effort or a convex cost paid on total effort.
struct CostModel {
  enum class Kind { kHardBudget, kSoftPower, kSoftLinear };

  Kind kind = Kind::kHardBudget;
  double budget = 1.0;
  double kappa = 1.0;  // soft power: c(x) = kappa * x^(1 + mu)
  double mu = 0.0;

  static CostModel Budget(double budget);
  static CostModel Power(double kappa, double mu);
  static CostModel Linear();

  bool is_hard() const { return kind == Kind::kHardBudget; }
  /// Cost of total effort. Zero for hard budgets (the constraint is handled
  /// separately by feasibility checks).
  double cost(double total_effort) const;
  double marginal_cost(double total_effort) const;

  void validate() const;
};

/// A project's value as a function of the submitted quality vector.
///
/// All kinds except `kMaxQuality` depend on the submissions only through the
/// total Q and expose v(Q), v'(Q), the average v(Q)/Q, and its derivative.
class ValueFunction {
 public:
  enum class Kind { kPower, kSaturating, kSqrt, kMaxQuality, kSinglePeaked };

  static ValueFunction Power(double weight, double alpha);
  static ValueFunction Saturating(double kappa, double beta);
  static ValueFunction Sqrt();
  static ValueFunction MaxQuality();
  static ValueFunction SinglePeaked(double r);

  Kind kind() const { return kind_; }
  bool sum_based() const { return kind_ != Kind::kMaxQuality; }
  bool monotone() const { return kind_ != Kind::kSinglePeaked; }
  /// Power exponent (1/2 for sqrt); throws for other kinds.
  double alpha() const;
  double weight() const { return weight_; }
  double beta() const { return beta_; }
  double peak_scale() const { return r_; }

  double operator()(const VectorRef& q) const;

  // Sum-based kinds only.
  double of_total(double total) const;
  double derivative(double total) const;
  /// v(Q)/Q, with the limit v'(0) at Q = 0.
  double average(double total) const;
  double average_derivative(double total) const;

  /// Returns a copy with the value scaled by factor > 0.
  ValueFunction scaled(double factor) const;

  std::string describe() const;

 private:
  ValueFunction(Kind kind, double weight, double alpha, double beta, double r)
      : kind_(kind), weight_(weight), alpha_(alpha), beta_(beta), r_(r) {}

  void require_sum_based() const;

  Kind kind_;
  double weight_;  // w for power and sqrt, kappa for saturating, scale for max
  double alpha_;
  double beta_;
  double r_;
};

double project_value(const ValueFunction& vf, const VectorRef& q);
/// v(q) - v(q with coordinate i zeroed).
double marginal_contribution(const ValueFunction& vf, const VectorRef& q,
                             Eigen::Index i);

}  // namespace collab
