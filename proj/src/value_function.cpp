#include "collab/value_function.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "collab/errors.hpp"

namespace collab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

EffortMap EffortMap::Linear(double ability) {
  EffortMap m;
  m.kind = Kind::kLinearAbility;
  m.ability = ability;
  m.validate();
  return m;
}

EffortMap EffortMap::Power(double scale, double exponent) {
  EffortMap m;
  m.kind = Kind::kPowerConvex;
  m.scale = scale;
  m.exponent = exponent;
  m.validate();
  return m;
}

void EffortMap::validate() const {
  if (kind == Kind::kLinearAbility) {
    require_positive(ability, "ability");
  } else {
    require_positive(scale, "effort scale");
    if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
      throw InvalidInput("effort exponent must be >= 1");
    }
  }
}

double EffortMap::effort(double q) const {
  if (q < 0.0) throw std::domain_error("quality must be nonnegative");
  if (kind == Kind::kLinearAbility) return q / ability;
  return scale * std::pow(q, exponent);
}

double EffortMap::quality(double x) const {
  if (x < 0.0) throw std::domain_error("effort must be nonnegative");
  if (kind == Kind::kLinearAbility) return ability * x;
  return std::pow(x / scale, 1.0 / exponent);
}

double EffortMap::marginal_effort(double q) const {
  if (kind == Kind::kLinearAbility) return 1.0 / ability;
  if (exponent == 1.0) return scale;
  return scale * exponent * std::pow(q, exponent - 1.0);
}

double effort_of_quality(const EffortMap& map, double quality) {
  return map.effort(quality);
}

double quality_of_effort(const EffortMap& map, double effort) {
  return map.quality(effort);
}

CostModel CostModel::Budget(double budget) {
  CostModel c;
  c.kind = Kind::kHardBudget;
  c.budget = budget;
  c.validate();
  return c;
}

CostModel CostModel::Power(double kappa, double mu) {
  CostModel c;
  c.kind = Kind::kSoftPower;
  c.kappa = kappa;
  c.mu = mu;
  c.validate();
  return c;
}

CostModel CostModel::Linear() {
  CostModel c;
  c.kind = Kind::kSoftLinear;
  return c;
}

void CostModel::validate() const {
  switch (kind) {
    case Kind::kHardBudget:
      require_positive(budget, "budget");
      break;
    case Kind::kSoftPower:
      require_positive(kappa, "cost kappa");
      if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw InvalidInput("cost mu must be >= 0");
      }
      break;
    case Kind::kSoftLinear:
      break;
  }
}

double CostModel::cost(double x) const {
  switch (kind) {
    case Kind::kHardBudget:
      return 0.0;
    case Kind::kSoftPower:
      return kappa * std::pow(x, 1.0 + mu);
    case Kind::kSoftLinear:
      return x;
  }
  return 0.0;
}

double CostModel::marginal_cost(double x) const {
  switch (kind) {
    case Kind::kHardBudget:
      return 0.0;
    case Kind::kSoftPower:
      if (mu == 0.0) return kappa;
      return kappa * (1.0 + mu) * std::pow(x, mu);
    case Kind::kSoftLinear:
      return 1.0;
  }
  return 0.0;
}

ValueFunction ValueFunction::Power(double weight, double alpha) {
  require_positive(weight, "value weight");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidInput("alpha out of range (0, 1]");
  }
  return ValueFunction(Kind::kPower, weight, alpha, 0.0, 0.0);
}

ValueFunction ValueFunction::Saturating(double kappa, double beta) {
  require_positive(kappa, "saturating kappa");
  require_positive(beta, "saturating beta");
  return ValueFunction(Kind::kSaturating, kappa, 0.0, beta, 0.0);
}

ValueFunction ValueFunction::Sqrt() {
  return ValueFunction(Kind::kSqrt, 1.0, 0.5, 0.0, 0.0);
}

ValueFunction ValueFunction::MaxQuality() {
  return ValueFunction(Kind::kMaxQuality, 1.0, 0.0, 0.0, 0.0);
}

ValueFunction ValueFunction::SinglePeaked(double r) {
  require_positive(r, "single-peaked r");
  return ValueFunction(Kind::kSinglePeaked, 1.0, 0.0, 0.0, r);
}

double ValueFunction::alpha() const {
  if (kind_ != Kind::kPower && kind_ != Kind::kSqrt) {
    throw InvalidInput("alpha is defined only for power values");
  }
  return alpha_;
}

void ValueFunction::require_sum_based() const {
  if (!sum_based()) {
    throw InvalidInput("value is not a function of total quality");
  }
}

double ValueFunction::operator()(const VectorRef& q) const {
  if (q.size() == 0) return 0.0;
  if (kind_ == Kind::kMaxQuality) return weight_ * q.maxCoeff();
  return of_total(q.sum());
}

double ValueFunction::of_total(double Q) const {
  require_sum_based();
  switch (kind_) {
    case Kind::kPower:
    case Kind::kSqrt:
      if (alpha_ == 1.0) return weight_ * Q;
      if (alpha_ == 0.5) return weight_ * std::sqrt(Q);
      return weight_ * std::pow(Q, alpha_);
    case Kind::kSaturating:
      return -weight_ * std::expm1(-beta_ * Q);
    case Kind::kSinglePeaked:
      return r_ * Q * (1.0 - Q);
    case Kind::kMaxQuality:
      break;
  }
  return 0.0;
}

double ValueFunction::derivative(double Q) const {
  require_sum_based();
  switch (kind_) {
    case Kind::kPower:
    case Kind::kSqrt:
      if (alpha_ == 1.0) return weight_;
      if (Q <= 0.0) return kInf;
      return weight_ * alpha_ * std::pow(Q, alpha_ - 1.0);
    case Kind::kSaturating:
      return weight_ * beta_ * std::exp(-beta_ * Q);
    case Kind::kSinglePeaked:
      return r_ * (1.0 - 2.0 * Q);
    case Kind::kMaxQuality:
      break;
  }
  return 0.0;
}

double ValueFunction::average(double Q) const {
  require_sum_based();
  if (Q <= 0.0) return derivative(0.0);
  switch (kind_) {
    case Kind::kPower:
    case Kind::kSqrt:
      if (alpha_ == 1.0) return weight_;
      return weight_ * std::pow(Q, alpha_ - 1.0);
    case Kind::kSaturating:
      return -weight_ * std::expm1(-beta_ * Q) / Q;
    case Kind::kSinglePeaked:
      return r_ * (1.0 - Q);
    case Kind::kMaxQuality:
      break;
  }
  return 0.0;
}

double ValueFunction::average_derivative(double Q) const {
  require_sum_based();
  switch (kind_) {
    case Kind::kPower:
    case Kind::kSqrt:
      if (alpha_ == 1.0) return 0.0;
      if (Q <= 0.0) return -kInf;
      return weight_ * (alpha_ - 1.0) * std::pow(Q, alpha_ - 2.0);
    case Kind::kSaturating: {
      const double x = beta_ * std::max(Q, 0.0);
      if (x < 1e-3) {
        // Series of d/dx (1 - e^-x)/x; the closed form cancels badly here.
        const double s = -0.5 + x * (1.0 / 3.0 + x * (-1.0 / 8.0 + x / 30.0));
        return weight_ * beta_ * beta_ * s;
      }
      return weight_ * (x * std::exp(-x) + std::expm1(-x)) / (Q * Q);
    }
    case Kind::kSinglePeaked:
      return -r_;
    case Kind::kMaxQuality:
      break;
  }
  return 0.0;
}

ValueFunction ValueFunction::scaled(double factor) const {
  require_positive(factor, "scale factor");
  ValueFunction out = *this;
  if (kind_ == Kind::kSinglePeaked) {
    out.r_ *= factor;
  } else {
    out.weight_ *= factor;
  }
  return out;
}

std::string ValueFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kPower:
      os << "power(w=" << weight_ << ",alpha=" << alpha_ << ")";
      break;
    case Kind::kSqrt:
      os << "sqrt";
      if (weight_ != 1.0) os << "(w=" << weight_ << ")";
      break;
    case Kind::kSaturating:
      os << "saturating(kappa=" << weight_ << ",beta=" << beta_ << ")";
      break;
    case Kind::kMaxQuality:
      os << "max_quality";
      if (weight_ != 1.0) os << "(w=" << weight_ << ")";
      break;
    case Kind::kSinglePeaked:
      os << "single_peaked(r=" << r_ << ")";
      break;
  }
  return os.str();
}

double project_value(const ValueFunction& vf, const VectorRef& q) {
  return vf(q);
}

double marginal_contribution(const ValueFunction& vf, const VectorRef& q,
                             Eigen::Index i) {
  if (i < 0 || i >= q.size()) {
    throw InvalidInput("participant index out of range");
  }
  if (q[i] == 0.0) return 0.0;
  if (vf.sum_based()) {
    double rest = 0.0;
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      if (k != i) rest += q[k];
    }
    return vf.of_total(rest + q[i]) - vf.of_total(rest);
  }
  Vector without = q;
  without[i] = 0.0;
  return vf(q) - vf(without);
}

}  // namespace collab
