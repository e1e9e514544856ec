#include "collab/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "collab/errors.hpp"

namespace collab {
namespace {

constexpr double kQualityCap = 1e12;

struct Demand {
  Vector q;
  double effort = 0.0;
};

Demand demand(std::span<const AllocationCoordinate> coords, double lambda,
              double tol) {
  Demand d;
  d.q.resize(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const double q = solve_coordinate(coords[j], lambda, tol);
    d.q[static_cast<Eigen::Index>(j)] = q;
    d.effort += coords[j].map.effort(q);
  }
  return d;
}

double midpoint(double lo, double hi) {
  // geometric steps while the bracket spans orders of magnitude
  if (lo > 0.0 && hi > 4.0 * lo) return std::sqrt(lo * hi);
  return 0.5 * (lo + hi);
}

// q_j = max(0, y_j - lambda / a_j) with sum_j q_j / a_j = budget; the
// breakpoints lambda = a_j y_j are visited in decreasing order.
Vector project_weighted_simplex(const VectorRef& y,
                                std::span<const EffortMap> maps,
                                double budget) {
  const auto n = y.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = j;
  auto breakpoint = [&](Eigen::Index j) {
    return maps[static_cast<std::size_t>(j)].ability * y[j];
  };
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return breakpoint(a) > breakpoint(b);
  });
  // Active set {order[0..k)}: effort(lambda) = S1 - lambda * S2 with
  // S1 = sum y_j / a_j and S2 = sum 1 / a_j^2.
  double s1 = 0.0;
  double s2 = 0.0;
  double lambda = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Eigen::Index j = order[k];
    const double a = maps[static_cast<std::size_t>(j)].ability;
    s1 += y[j] / a;
    s2 += 1.0 / (a * a);
    lambda = (s1 - budget) / s2;
    const double next =
        k + 1 < order.size() ? breakpoint(order[k + 1]) : -1.0;
    if (lambda >= std::max(next, 0.0)) break;
  }
  lambda = std::max(lambda, 0.0);
  Vector q(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    q[j] = std::max(0.0, y[j] - lambda / maps[static_cast<std::size_t>(j)].ability);
  }
  return q;
}

}  // namespace

double solve_coordinate(const AllocationCoordinate& c, double lambda,
                        double tol) {
  auto phi = [&](double q) {
    return c.gain_derivative(q) - lambda * c.map.marginal_effort(q);
  };
  const double at_zero = phi(0.0);
  if (!(at_zero > 0.0)) return 0.0;
  double lo = 0.0;
  double hi = c.upper;
  if (std::isfinite(hi)) {
    if (hi <= 0.0) return 0.0;
    if (phi(hi) >= 0.0) return hi;
  } else {
    hi = 1.0;
    while (phi(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > kQualityCap) return kQualityCap;
    }
  }
  const double width = tol * std::max(1.0, hi);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (phi(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

AllocationResult allocate_budget(std::span<const AllocationCoordinate> coords,
                                 double budget,
                                 const AllocationTolerances& tol) {
  if (!(budget >= 0.0)) throw InvalidInput("budget must be nonnegative");
  AllocationResult out;
  if (coords.empty()) {
    out.q.resize(0);
    return out;
  }
  const double slack_tol = tol.effort * std::max(1.0, budget);

  Demand free = demand(coords, 0.0, tol.quality);
  if (free.effort <= budget + slack_tol) {
    out.q = std::move(free.q);
    out.effort = free.effort;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  Demand at_hi = demand(coords, hi, tol.quality);
  Demand at_lo = free;
  if (at_hi.effort > budget) {
    while (at_hi.effort > budget) {
      lo = hi;
      at_lo = std::move(at_hi);
      hi *= 2.0;
      if (hi > 1e300) throw SolverError("budget multiplier diverged");
      at_hi = demand(coords, hi, tol.quality);
    }
  } else {
    double probe = 0.5;
    while (probe > 1e-300) {
      Demand d = demand(coords, probe, tol.quality);
      if (d.effort > budget) {
        lo = probe;
        at_lo = std::move(d);
        break;
      }
      hi = probe;
      at_hi = std::move(d);
      probe *= 0.5;
    }
  }

  for (int it = 0; it < tol.max_outer; ++it) {
    if (budget - at_hi.effort <= slack_tol) break;
    const double mid = midpoint(lo, hi);
    if (!(mid > lo && mid < hi)) break;
    Demand d = demand(coords, mid, tol.quality);
    if (d.effort > budget) {
      lo = mid;
      at_lo = std::move(d);
    } else {
      hi = mid;
      at_hi = std::move(d);
    }
  }

  // Coordinates that still differ between the bracket ends are indifferent
  // at the multiplier; hand them the leftover budget.
  out.q = at_hi.q;
  double remaining = budget - at_hi.effort;
  for (std::size_t j = 0; j < coords.size() && remaining > 0.0; ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    if (at_lo.q[k] <= out.q[k]) continue;
    const EffortMap& m = coords[j].map;
    const double have = m.effort(out.q[k]);
    const double add = std::min(m.effort(at_lo.q[k]) - have, remaining);
    out.q[k] = m.quality(have + add);
    remaining -= add;
  }
  out.multiplier = hi;
  out.effort = budget - std::max(remaining, 0.0);
  return out;
}

AllocationResult allocate_with_cost(
    std::span<const AllocationCoordinate> coords, const CostModel& cost,
    const AllocationTolerances& tol) {
  if (cost.is_hard()) {
    throw InvalidInput("allocate_with_cost needs a soft cost model");
  }
  AllocationResult out;
  if (coords.empty()) {
    out.q.resize(0);
    return out;
  }
  auto excess = [&](double lambda, Demand& d) {
    d = demand(coords, lambda, tol.quality);
    return lambda - cost.marginal_cost(d.effort);
  };

  Demand best;
  if (cost.kind == CostModel::Kind::kSoftLinear ||
      (cost.kind == CostModel::Kind::kSoftPower && cost.mu == 0.0)) {
    const double lambda = cost.marginal_cost(0.0);
    best = demand(coords, lambda, tol.quality);
    out.q = std::move(best.q);
    out.effort = best.effort;
    out.multiplier = lambda;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  Demand d_hi;
  if (excess(hi, d_hi) < 0.0) {
    do {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw SolverError("marginal cost level diverged");
    } while (excess(hi, d_hi) < 0.0);
  } else {
    Demand d_lo;
    double probe = 0.5;
    while (probe > 1e-300 && excess(probe, d_lo) >= 0.0) {
      hi = probe;
      d_hi = d_lo;
      probe *= 0.5;
    }
    lo = probe > 1e-300 ? probe : 0.0;
  }

  for (int it = 0; it < tol.max_outer; ++it) {
    const double mid = midpoint(lo, hi);
    if (!(mid > lo && mid < hi) || hi - lo <= 1e-15 * hi) break;
    Demand d;
    if (excess(mid, d) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
      d_hi = std::move(d);
    }
  }
  out.q = std::move(d_hi.q);
  out.effort = d_hi.effort;
  out.multiplier = hi;
  return out;
}

Vector project_onto_budget(const VectorRef& y, std::span<const EffortMap> maps,
                           double budget) {
  if (static_cast<std::size_t>(y.size()) != maps.size()) {
    throw InvalidInput("projection: size mismatch");
  }
  Vector clipped = y.cwiseMax(0.0);
  if (!std::isfinite(budget)) return clipped;
  double effort = 0.0;
  for (std::size_t j = 0; j < maps.size(); ++j) {
    effort += maps[j].effort(clipped[static_cast<Eigen::Index>(j)]);
  }
  if (effort <= budget) return clipped;

  const bool linear = std::all_of(maps.begin(), maps.end(), [](const auto& m) {
    return m.kind == EffortMap::Kind::kLinearAbility;
  });
  if (linear) return project_weighted_simplex(y, maps, budget);

  std::vector<AllocationCoordinate> coords;
  coords.reserve(maps.size());
  for (std::size_t j = 0; j < maps.size(); ++j) {
    const double target = y[static_cast<Eigen::Index>(j)];
    AllocationCoordinate c;
    c.gain_derivative = [target](double q) { return target - q; };
    c.map = maps[j];
    c.upper = maps[j].quality(budget);
    coords.push_back(std::move(c));
  }
  AllocationTolerances tol;
  tol.quality = 1e-14;
  tol.effort = 1e-13;
  return allocate_budget(coords, budget, tol).q;
}

}  // namespace collab
