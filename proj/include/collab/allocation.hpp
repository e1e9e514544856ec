#pragma once

#include <functional>
#include <limits>
#include <span>

#include "collab/value_function.hpp"

namespace collab {

/// One term g_j(q_j) of a separable concave objective, described by its
/// derivative (nonincreasing in q) and the effort map charging for q.
struct AllocationCoordinate {
  std::function<double(double)> gain_derivative;
  EffortMap map;
  /// Largest admissible quality; infinity means "find by doubling".
  double upper = std::numeric_limits<double>::infinity();
};

struct AllocationTolerances {
  double quality = 1e-12;  // inner 1-D solve, relative to the bracket
  double effort = 1e-10;   // outer bisection, relative to max(1, budget)
  int max_outer = 400;
};

struct AllocationResult {
  Vector q;
  double multiplier = 0.0;  // lambda_B, or the marginal cost level
  double effort = 0.0;
};

/// Maximizes sum_j g_j(q_j) subject to sum_j x_j(q_j) <= budget, q >= 0, by
/// bisection on the budget multiplier. Each coordinate solves
/// g_j'(q) = lambda * x_j'(q) by bisection on q.
AllocationResult allocate_budget(std::span<const AllocationCoordinate> coords,
                                 double budget,
                                 const AllocationTolerances& tol = {});

/// Maximizes sum_j g_j(q_j) - c(sum_j x_j(q_j)) for a convex, increasing cost
/// by bisection on the marginal-cost level lambda = c'(X).
AllocationResult allocate_with_cost(
    std::span<const AllocationCoordinate> coords, const CostModel& cost,
    const AllocationTolerances& tol = {});

/// Stationary point of g'(q) = lambda * x'(q) on [0, upper].
double solve_coordinate(const AllocationCoordinate& c, double lambda,
                        double tol = 1e-12);

/// Euclidean projection of y onto {q >= 0 : sum_j x_j(q_j) <= budget}. An
/// infinite budget projects onto the nonnegative orthant. For linear maps
/// this is a projection onto a weighted simplex.
Vector project_onto_budget(const VectorRef& y, std::span<const EffortMap> maps,
                           double budget);

}  // namespace collab
