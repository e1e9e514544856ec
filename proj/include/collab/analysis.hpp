#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "collab/solvers.hpp"

namespace collab {

struct SmoothnessParams {
  double lambda = 1.0;
  double mu = 1.0;

  /// lambda / (1 + mu).
  double guarantee() const { return lambda / (1.0 + mu); }
  void validate() const;
};

struct SmoothnessReport {
  int evaluated = 0;
  int violations = 0;
  double min_slack = 0.0;
  double opt = 0.0;
  bool passes = true;
  QualityProfile worst;
};

/// For each test profile q: sum_i u_i(q*_i, q_-i) - lambda * SW(q*) +
/// mu * SW(q). A slack below -1e-8 (1 + SW(q*)) counts as a violation.
SmoothnessReport check_universal_smoothness(
    const Instance& inst, const SmoothnessParams& params,
    const QualityProfile& deviation, const std::vector<QualityProfile>& tests);

/// Same, with the deviation profile taken from solve_opt.
SmoothnessReport check_universal_smoothness(
    const Instance& inst, const SmoothnessParams& params,
    const std::vector<QualityProfile>& tests);

/// Profiles drawn uniformly from each player's feasible set (random split
/// of a random fraction of the budget; soft costs: qualities in [0, 2]).
std::vector<QualityProfile> random_feasible_profiles(const Instance& inst,
                                                     int count,
                                                     std::uint64_t seed);

/// y^2/4 when x >= y/2, else x (y - x).
double k_fun(double x, double y);

struct KFactReport {
  int trials = 0;
  int violations = 0;
  double max_excess = 0.0;  // max of sum x_i (y_i - x_i) - k(x, y)
  int tight_first = 0;      // witnesses within 1e-12 on the y^2/4 branch
  int tight_second = 0;     // ... on the x (y - x) branch
  bool passes() const { return violations == 0; }
};

/// Random nonnegative splits of up to max_coords coordinates, plus the
/// equality cases of both branches.
KFactReport check_k_fact(int trials, std::uint64_t seed, int max_coords = 8);

/// The z > 2 branch of h: alpha z - lambda z^alpha + mu, or the same with
/// 1 - alpha added so that h is continuous at z = 2.
enum class TailForm { kStated, kContinuous };

struct HValue {
  double value = 0.0;
  bool upper_branch = false;  // z > 2
  /// The other branch's expression at the same z.
  double other_branch = 0.0;
};

/// z - ((1 - alpha)/4) z^2 - lambda z^alpha + mu for z <= 2;
/// alpha z - lambda z^alpha + mu for z > 2.
HValue h_alpha(double z, double lambda, double mu, double alpha,
               TailForm tail = TailForm::kStated);

struct PoaAlpha {
  double guarantee = 0.0;  // 2^(1-alpha) / (2 - alpha)
  double poa = 0.0;        // (2 - alpha) / 2^(1-alpha)
  double lambda = 0.0;     // 2^(1-alpha)
  double mu = 0.0;         // 1 - alpha
};

PoaAlpha poa_alpha_analytic(double alpha);

struct GuaranteeMinimum {
  double alpha = 0.0;
  double guarantee = 0.0;
};

/// argmin over alpha in (0, 1] of 2^(1-alpha)/(2-alpha), by golden section.
GuaranteeMinimum min_guarantee();

struct PoaSearchConfig {
  double z_max = 50.0;
  int z_points = 20001;
  double lambda_lo = 0.05;
  double lambda_hi = 4.0;
  double tol = 1e-10;
  TailForm tail = TailForm::kStated;
};

struct PoaNumeric {
  double poa = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
};

/// min over lambda, mu >= 0 of (1 + mu)/lambda subject to h >= 0 on the
/// z-grid. Golden section on lambda; mu(lambda) is the smallest value that
/// clears every grid point.
PoaNumeric poa_alpha_numeric(double alpha, const PoaSearchConfig& config = {});

/// |f'(x) x / f(x)| with a central difference of step 1e-6 x.
double elasticity_numeric(const std::function<double(double)>& f, double x);

struct LowerBoundPrediction {
  double eq_welfare = 0.0;       // 1 - e^{-alpha n}
  double opt_lower_bound = 0.0;  // 1 - e^{-alpha} + ((n-1)^2/(beta n^2))(1 - e^{-beta})
  double ratio = 0.0;            // 1 + (1 - 1/n)^2 (1 - e^{-beta}) / beta
  double ratio_limit = 0.0;      // 1 + (1 - 1/n)^2
};

/// n players and n projects, unit budgets, identity maps, proportional
/// sharing. Project 1 is worth 1 - e^{-alpha Q}; the others kappa (1 -
/// e^{-beta Q}) with kappa = (n - 1)/(beta n^2).
Instance lower_bound_instance(int n, double alpha, double beta);
LowerBoundPrediction lower_bound_prediction(int n, double alpha, double beta);
/// Player 1 on project 1 and player i on project i: the profile behind the
/// OPT lower bound.
QualityProfile lower_bound_witness(const Instance& inst);

/// n players, one sqrt project, identity maps, linear costs, proportional.
Instance linear_cost_instance(int n);
/// n^2 / (2n - 1).
double linear_cost_poa(int n);

struct SoftBounds {
  double welfare = 0.0;     // mu / (1 + 2 mu)
  double production = 0.0;  // mu / (2 (1 + mu))
};

/// mu = infinity gives the (1/2, 1/2) limit.
SoftBounds soft_budget_bounds(double mu);

struct NonmonotoneBound {
  double bound = 0.0;         // n / (-v'(1))
  double q_eq = 0.0;          // symmetric equilibrium total
  double q_opt = 0.0;         // peak of v
  double realized_poa = 0.0;  // v(q_opt) / v(q_eq)
  bool eq_above = false;      // q_eq >= 1 - 1/n
};

NonmonotoneBound nonmonotone_poa_bound(const ValueFunction& vf, int n);

/// (SW(eq) + V(eq)) - OPT.
double welfare_plus_production_slack(const Instance& inst,
                                     const QualityProfile& eq, double opt);

struct PoaReport {
  std::string instance;
  std::string rule;
  int n = 0;
  double param = 0.0;
  double eq_welfare = 0.0;
  double opt_welfare = 0.0;
  double ratio = 0.0;      // opt / eq
  double predicted = 0.0;  // the closed-form value being checked
  double bound = 0.0;      // the threshold the measured value must meet
  bool pass = false;
};

std::string poa_csv_header();
std::string to_csv_row(const PoaReport& r);

/// Power values w Q^alpha, proportional sharing, linear abilities, random
/// participation; n in [2, max_players], m in [1, max_projects].
Instance random_constant_elasticity_instance(double alpha, std::mt19937_64& rng,
                                             int max_players = 6,
                                             int max_projects = 6);

enum class ValueFamily { kConcaveOfSum, kMaxQuality };

/// Hard budgets, monotone submodular values from the given family.
Instance random_submodular_instance(ValueFamily family, const SharingRule& rule,
                                    std::mt19937_64& rng, int max_players = 4,
                                    int max_projects = 3);

/// Costs kappa x^(1 + mu), concave-of-sum values, proportional sharing.
Instance random_soft_cost_instance(double mu, std::mt19937_64& rng,
                                   int max_players = 5, int max_projects = 4);

}  // namespace collab
