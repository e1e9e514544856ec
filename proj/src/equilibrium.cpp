#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "collab/errors.hpp"
#include "collab/solvers.hpp"

namespace collab {

EquilibriumResult br_dynamics(const Instance& inst, const SolverConfig& config,
                              std::optional<QualityProfile> init) {
  config.validate();
  QualityProfile p = init ? std::move(*init) : uniform_profile(inst);
  if (p.size() != inst.num_edges()) {
    throw InvalidInput("initial profile does not match the instance");
  }
  if (!is_feasible(p, inst).feasible) {
    throw InvalidInput("initial profile is infeasible");
  }

  std::vector<int> order(static_cast<std::size_t>(inst.num_players()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  EquilibriumResult out;
  for (int round = 1; round <= config.max_iters; ++round) {
    if (config.random_order) std::shuffle(order.begin(), order.end(), rng);
    double change = 0.0;
    for (int i : order) {
      const Vector next = best_response(inst, p, i, config);
      const Vector prev = player_qualities(inst, p, i);
      if (next.size() > 0) {
        change = std::max(change, (next - prev).cwiseAbs().maxCoeff());
      }
      set_player_qualities(inst, p, i, next);
    }
    out.iterations = round;
    out.last_change = change;
    if (change < config.tol_q) {
      out.converged = true;
      break;
    }
  }

  for (int i = 0; i < inst.num_players(); ++i) {
    out.max_gain =
        std::max(out.max_gain, best_response_gain(inst, p, i, config));
  }
  if (out.max_gain > 10.0 * config.tol_u) out.converged = false;
  out.utilities = player_utilities(inst, p);
  out.welfare = social_welfare(p, inst);
  out.profile = std::move(p);
  return out;
}

namespace {

double marginal_cost_or_zero(const CostModel& cost, double x) {
  return cost.is_hard() ? 0.0 : cost.marginal_cost(x);
}

// Bisection for a root of f on (0, cap], where f > 0 near 0. Returns cap
// when f stays positive up to a finite cap.
template <typename F>
double positive_root(F&& f, double cap, const char* what) {
  const std::string fail = std::string(what) + ": no sign change";
  double lo = std::min(1.0, cap);
  while (!(f(lo) > 0.0)) {
    lo *= 0.5;
    if (lo < 1e-300) throw SolverError(fail);
  }
  double hi = lo;
  while (f(hi) > 0.0) {
    if (hi >= cap) return cap;
    lo = hi;
    hi = std::min(2.0 * hi, cap);
    if (hi > 1e15) throw SolverError(fail);
  }
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void check_symmetric(const ValueFunction& vf, const CostModel& cost, int n) {
  if (n < 1) throw InvalidInput("n must be >= 1");
  if (!vf.sum_based()) throw InvalidInput("symmetric solver needs a sum-based value");
  cost.validate();
}

}  // namespace

double symmetric_single_project_eq(const ValueFunction& vf,
                                   const CostModel& cost, int n) {
  check_symmetric(vf, cost, n);
  const double share_loss = 1.0 - 1.0 / n;
  auto foc = [&](double x) {
    const double dv = vf.derivative(x);
    return dv - marginal_cost_or_zero(cost, x / n) +
           share_loss * (vf.of_total(x) - dv * x) / x;
  };
  const double cap = cost.is_hard() ? n * cost.budget
                                    : std::numeric_limits<double>::infinity();
  return positive_root(foc, cap, "symmetric equilibrium");
}

double symmetric_single_project_opt(const ValueFunction& vf,
                                    const CostModel& cost, int n) {
  check_symmetric(vf, cost, n);
  auto foc = [&](double x) {
    return vf.derivative(x) - marginal_cost_or_zero(cost, x / n);
  };
  if (!cost.is_hard()) {
    // A value and cost with equal constant slopes leave no interior optimum.
    const double a = foc(0.5);
    const double b = foc(2.0);
    if (std::abs(a - b) <= 1e-14 * (1.0 + std::abs(a))) {
      throw SolverError("no interior optimum");
    }
  }
  const double cap = cost.is_hard() ? n * cost.budget
                                    : std::numeric_limits<double>::infinity();
  return positive_root(foc, cap, "symmetric optimum");
}

}  // namespace collab
