#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "collab/analysis.hpp"
#include "collab/errors.hpp"

namespace collab {

void SmoothnessParams::validate() const {
  if (!(lambda > 0.0) || !(mu >= 0.0)) {
    throw InvalidInput("smoothness needs lambda > 0 and mu >= 0");
  }
}

SmoothnessReport check_universal_smoothness(
    const Instance& inst, const SmoothnessParams& params,
    const QualityProfile& deviation, const std::vector<QualityProfile>& tests) {
  params.validate();
  if (!is_feasible(deviation, inst).feasible) {
    throw InvalidInput("smoothness: deviation profile is infeasible");
  }
  SmoothnessReport report;
  report.opt = social_welfare(deviation, inst);
  report.min_slack = std::numeric_limits<double>::infinity();
  const double tol = 1e-8 * (1.0 + std::abs(report.opt));
  for (const QualityProfile& q : tests) {
    double deviations = 0.0;
    for (int i = 0; i < inst.num_players(); ++i) {
      QualityProfile moved = q;
      set_player_qualities(inst, moved, i, player_qualities(inst, deviation, i));
      deviations += player_utility(inst, moved, i);
    }
    const double slack = deviations - params.lambda * report.opt +
                         params.mu * social_welfare(q, inst);
    ++report.evaluated;
    if (slack < report.min_slack) {
      report.min_slack = slack;
      report.worst = q;
    }
    if (slack < -tol) ++report.violations;
  }
  if (tests.empty()) report.min_slack = 0.0;
  report.passes = report.violations == 0;
  return report;
}

SmoothnessReport check_universal_smoothness(
    const Instance& inst, const SmoothnessParams& params,
    const std::vector<QualityProfile>& tests) {
  return check_universal_smoothness(inst, params, solve_opt(inst).profile, tests);
}

std::vector<QualityProfile> random_feasible_profiles(const Instance& inst,
                                                     int count,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<QualityProfile> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int c = 0; c < count; ++c) {
    QualityProfile p(inst);
    for (const Player& pl : inst.players()) {
      if (!pl.cost.is_hard()) {
        for (int e : pl.edges) p[e] = 2.0 * unit(rng);
        continue;
      }
      // Exponential weights give a uniform point on the simplex; scaling by
      // a uniform fraction reaches the interior as well.
      std::vector<double> w;
      double sum = 0.0;
      for (std::size_t s = 0; s < pl.edges.size(); ++s) {
        w.push_back(-std::log(1.0 - unit(rng)));
        sum += w.back();
      }
      const double spend = unit(rng) < 0.5 ? 1.0 : unit(rng);
      for (std::size_t s = 0; s < pl.edges.size(); ++s) {
        const int e = pl.edges[s];
        p[e] = inst.edge(e).map.quality(pl.cost.budget * spend * w[s] / sum);
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

double k_fun(double x, double y) {
  if (x < 0.0 || y < 0.0) throw InvalidInput("k_fun needs x, y >= 0");
  return x >= 0.5 * y ? 0.25 * y * y : x * (y - x);
}

KFactReport check_k_fact(int trials, std::uint64_t seed, int max_coords) {
  if (max_coords < 1) throw InvalidInput("check_k_fact needs max_coords >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, max_coords);
  KFactReport r;
  auto record = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
    double x = 0.0;
    double y = 0.0;
    double lhs = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      x += xs[i];
      y += ys[i];
      lhs += xs[i] * (ys[i] - xs[i]);
    }
    const double k = k_fun(x, y);
    const double excess = lhs - k;
    ++r.trials;
    r.max_excess = std::max(r.max_excess, excess);
    if (excess > 1e-12 * (1.0 + std::abs(k))) ++r.violations;
    if (std::abs(excess) <= 1e-12 * (1.0 + std::abs(k))) {
      if (x >= 0.5 * y) {
        ++r.tight_first;
      } else {
        ++r.tight_second;
      }
    }
  };

  for (int t = 0; t < trials; ++t) {
    const int d = dim(rng);
    const double scale_x = std::exp(4.0 * unit(rng) - 2.0);
    const double scale_y = std::exp(4.0 * unit(rng) - 2.0);
    std::vector<double> xs(static_cast<std::size_t>(d));
    std::vector<double> ys(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      xs[static_cast<std::size_t>(i)] = scale_x * unit(rng);
      ys[static_cast<std::size_t>(i)] = scale_y * unit(rng);
    }
    record(xs, ys);
  }
  // Equality cases: one coordinate with x = y/2, and one with x < y/2.
  for (int t = 0; t < 10; ++t) {
    const double y = 1.0 + unit(rng);
    record({0.5 * y}, {y});
    record({0.25 * y * unit(rng)}, {y});
  }
  record({1.0}, {4.0});
  return r;
}

}  // namespace collab
