#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "collab/allocation.hpp"
#include "collab/errors.hpp"
#include "collab/solvers.hpp"

namespace collab {
namespace {

constexpr double kGolden = 0.6180339887498949;

std::vector<OwnShareCurve> own_curves(const Instance& inst,
                                      const QualityProfile& profile,
                                      int player) {
  std::vector<OwnShareCurve> curves;
  const Player& pl = inst.player(player);
  curves.reserve(pl.edges.size());
  for (int e : pl.edges) {
    const Edge& edge = inst.edge(e);
    const Project& proj = inst.project(edge.project);
    curves.emplace_back(proj.sharing, proj.value,
                        project_qualities(inst, profile, edge.project),
                        edge.project_slot, inst.epsilon_floor());
  }
  return curves;
}

std::vector<EffortMap> player_maps(const Instance& inst, int player) {
  std::vector<EffortMap> maps;
  for (int e : inst.player(player).edges) maps.push_back(inst.edge(e).map);
  return maps;
}

bool concave_player(const Instance& inst, int player) {
  for (int e : inst.player(player).edges) {
    const Project& proj = inst.project(inst.edge(e).project);
    if (!proj.sharing.concave_for(proj.value)) return false;
  }
  return true;
}

double curve_utility(const std::vector<OwnShareCurve>& curves,
                     const std::vector<EffortMap>& maps, const CostModel& cost,
                     const VectorRef& q) {
  double u = 0.0;
  double x = 0.0;
  for (std::size_t s = 0; s < curves.size(); ++s) {
    const auto k = static_cast<Eigen::Index>(s);
    u += curves[s].value(q[k]);
    x += maps[s].effort(q[k]);
  }
  if (!cost.is_hard()) u -= cost.cost(x);
  return u;
}

// Maximizes f on [lo, hi]: coarse scan, then golden-section around the best
// scan point.
template <typename F>
double line_search(F&& f, double lo, double hi) {
  constexpr int kScan = 20;
  double best_t = lo;
  double best = f(lo);
  for (int s = 1; s <= kScan; ++s) {
    const double t = lo + (hi - lo) * s / kScan;
    const double v = f(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  const double step = (hi - lo) / kScan;
  double a = std::max(lo, best_t - step);
  double b = std::min(hi, best_t + step);
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, hi - lo); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  const double t = 0.5 * (a + b);
  return f(t) > best ? t : best_t;
}

// Local search for shares that are not concave in the own quality. Hard
// budgets move effort between pairs of projects and also try every vertex;
// soft costs search each coordinate in turn.
Vector fallback_search(const std::vector<OwnShareCurve>& curves,
                       const std::vector<EffortMap>& maps,
                       const CostModel& cost, Vector q, double tol_u) {
  const auto m = static_cast<Eigen::Index>(curves.size());
  auto util = [&](const Vector& v) { return curve_utility(curves, maps, cost, v); };
  double best = util(q);

  if (cost.is_hard()) {
    for (Eigen::Index j = 0; j < m; ++j) {
      Vector vertex = Vector::Zero(m);
      vertex[j] = maps[static_cast<std::size_t>(j)].quality(cost.budget);
      const double u = util(vertex);
      if (u > best) {
        best = u;
        q = vertex;
      }
    }
  }

  for (int sweep = 0; sweep < 50; ++sweep) {
    bool improved = false;
    if (cost.is_hard()) {
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = a + 1; b < m; ++b) {
          const EffortMap& ma = maps[static_cast<std::size_t>(a)];
          const EffortMap& mb = maps[static_cast<std::size_t>(b)];
          const double xa = ma.effort(q[a]);
          const double pool = xa + mb.effort(q[b]);
          if (pool <= 0.0) continue;
          Vector trial = q;
          auto along = [&](double t) {
            trial[a] = ma.quality(t);
            trial[b] = mb.quality(pool - t);
            return util(trial);
          };
          const double t = line_search(along, 0.0, pool);
          const double u = along(t);
          if (u > best + tol_u) {
            best = u;
            q = trial;
            improved = true;
          }
        }
      }
    } else {
      for (Eigen::Index j = 0; j < m; ++j) {
        Vector trial = q;
        auto along = [&](double t) {
          trial[j] = t;
          return util(trial);
        };
        double cap = std::max(1.0, 2.0 * q[j]);
        while (cap < 1e12 && along(cap) > along(0.0) - 1.0) cap *= 2.0;
        const double t = line_search(along, 0.0, cap);
        const double u = along(t);
        if (u > best + tol_u) {
          best = u;
          q = trial;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return q;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iters < 1) throw InvalidInput("max_iters must be >= 1");
  if (!(tol_q > 0.0) || !(tol_u > 0.0) || !(inner_tol > 0.0)) {
    throw InvalidInput("solver tolerances must be positive");
  }
  if (horizon < 1) throw InvalidInput("horizon must be >= 1");
  if (!(step_scale > 0.0)) throw InvalidInput("step_scale must be positive");
  if (trace_samples < 0) throw InvalidInput("trace_samples must be >= 0");
}

Vector project_player(const Instance& inst, int player, const VectorRef& q) {
  const Player& pl = inst.player(player);
  if (!pl.cost.is_hard()) return q.cwiseMax(0.0);
  const std::vector<EffortMap> maps = player_maps(inst, player);
  return project_onto_budget(q, maps, pl.cost.budget);
}

Vector best_response(const Instance& inst, const QualityProfile& profile,
                     int player, const SolverConfig& config) {
  const Player& pl = inst.player(player);
  const bool concave = concave_player(inst, player);
  if (!concave && !config.allow_fallback) {
    throw InvalidInput(
        "best response: sharing rule is not concave in own quality; enable "
        "the fallback search");
  }
  const std::vector<OwnShareCurve> curves = own_curves(inst, profile, player);
  const std::vector<EffortMap> maps = player_maps(inst, player);

  std::vector<AllocationCoordinate> coords(curves.size());
  for (std::size_t s = 0; s < curves.size(); ++s) {
    const OwnShareCurve* curve = &curves[s];
    coords[s].gain_derivative = [curve](double q) { return curve->derivative(q); };
    coords[s].map = maps[s];
    if (pl.cost.is_hard()) coords[s].upper = maps[s].quality(pl.cost.budget);
  }
  AllocationTolerances tol;
  tol.quality = config.inner_tol;
  Vector q = pl.cost.is_hard() ? allocate_budget(coords, pl.cost.budget, tol).q
                               : allocate_with_cost(coords, pl.cost, tol).q;
  if (!concave) {
    q = fallback_search(curves, maps, pl.cost, std::move(q), config.tol_u);
  }
  return q;
}

double best_response_gain(const Instance& inst, const QualityProfile& profile,
                          int player, const SolverConfig& config) {
  QualityProfile moved = profile;
  set_player_qualities(inst, moved, player,
                       best_response(inst, profile, player, config));
  return player_utility(inst, moved, player) -
         player_utility(inst, profile, player);
}

Vector utility_gradient(const Instance& inst, const QualityProfile& profile) {
  Vector g(inst.num_edges());
  for (int i = 0; i < inst.num_players(); ++i) {
    const Player& pl = inst.player(i);
    const std::vector<OwnShareCurve> curves = own_curves(inst, profile, i);
    const double marginal =
        pl.cost.is_hard() ? 0.0
                          : pl.cost.marginal_cost(total_effort(inst, profile, i));
    for (std::size_t s = 0; s < curves.size(); ++s) {
      const int e = pl.edges[s];
      double d = curves[s].derivative(profile[e]);
      if (!std::isfinite(d)) d = std::numeric_limits<double>::max() / 4;
      g[e] = d - marginal * inst.edge(e).map.marginal_effort(profile[e]);
    }
  }
  return g;
}

Vector welfare_gradient(const Instance& inst, const QualityProfile& profile) {
  Vector g(inst.num_edges());
  const double tiny = std::max(inst.epsilon_floor(), 1e-12);
  std::vector<double> dv(static_cast<std::size_t>(inst.num_projects()));
  for (int j = 0; j < inst.num_projects(); ++j) {
    const ValueFunction& vf = inst.project(j).value;
    if (!vf.sum_based()) {
      throw InvalidInput("welfare gradient needs sum-based values");
    }
    dv[static_cast<std::size_t>(j)] =
        vf.derivative(std::max(project_total(inst, profile, j), tiny));
  }
  for (int i = 0; i < inst.num_players(); ++i) {
    const Player& pl = inst.player(i);
    const double marginal =
        pl.cost.is_hard() ? 0.0
                          : pl.cost.marginal_cost(total_effort(inst, profile, i));
    for (int e : pl.edges) {
      const Edge& edge = inst.edge(e);
      g[e] = dv[static_cast<std::size_t>(edge.project)] -
             marginal * edge.map.marginal_effort(profile[e]);
    }
  }
  return g;
}

}  // namespace collab
