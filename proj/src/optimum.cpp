#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "collab/allocation.hpp"
#include "collab/errors.hpp"
#include "collab/solvers.hpp"

namespace collab {
namespace {

constexpr int kRestarts = 5;
constexpr double kCertifyResidual = 1e-6;
constexpr double kMaxCells = 2e7;

// Welfare without the feasibility check; sum-based projects only.
double welfare_sum_based(const Instance& inst, const Vector& q) {
  std::vector<double> totals(static_cast<std::size_t>(inst.num_projects()), 0.0);
  std::vector<double> efforts(static_cast<std::size_t>(inst.num_players()), 0.0);
  for (int e = 0; e < inst.num_edges(); ++e) {
    const Edge& edge = inst.edge(e);
    totals[static_cast<std::size_t>(edge.project)] += q[e];
    efforts[static_cast<std::size_t>(edge.player)] += edge.map.effort(q[e]);
  }
  double w = 0.0;
  for (int j = 0; j < inst.num_projects(); ++j) {
    w += inst.project(j).value.of_total(
        std::max(totals[static_cast<std::size_t>(j)], inst.epsilon_floor()));
  }
  for (int i = 0; i < inst.num_players(); ++i) {
    const CostModel& c = inst.player(i).cost;
    if (!c.is_hard()) w -= c.cost(efforts[static_cast<std::size_t>(i)]);
  }
  return w;
}

double welfare_any(const Instance& inst, const Vector& q) {
  if (inst.all_sum_based()) return welfare_sum_based(inst, q);
  const ProductionCost pc = production_and_cost(QualityProfile(q), inst);
  return pc.production - pc.cost;
}

Vector project_all(const Instance& inst, const Vector& q) {
  Vector out(q.size());
  for (int i = 0; i < inst.num_players(); ++i) {
    const auto& edges = inst.player(i).edges;
    Vector qi(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t s = 0; s < edges.size(); ++s) qi[static_cast<Eigen::Index>(s)] = q[edges[s]];
    const Vector pi = project_player(inst, i, qi);
    for (std::size_t s = 0; s < edges.size(); ++s) out[edges[s]] = pi[static_cast<Eigen::Index>(s)];
  }
  return out;
}

double kkt_residual(const Instance& inst, const Vector& q) {
  const Vector g = welfare_gradient(inst, QualityProfile(q));
  if (q.size() == 0) return 0.0;
  return (q - project_all(inst, q + g)).cwiseAbs().maxCoeff();
}

QualityProfile random_start(const Instance& inst, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  QualityProfile p(inst);
  for (const Player& pl : inst.players()) {
    std::vector<double> w;
    double sum = 0.0;
    for (std::size_t s = 0; s < pl.edges.size(); ++s) {
      w.push_back(-std::log(1.0 - unit(rng)));
      sum += w.back();
    }
    for (std::size_t s = 0; s < pl.edges.size(); ++s) {
      const Edge& edge = inst.edge(pl.edges[s]);
      if (pl.cost.is_hard()) {
        p[pl.edges[s]] = edge.map.quality(pl.cost.budget * w[s] / sum);
      } else {
        p[pl.edges[s]] = unit(rng);
      }
    }
  }
  return p;
}

// Projected ascent with Barzilai-Borwein steps and a nonmonotone Armijo
// test against the best of the last few values.
Vector projected_ascent(const Instance& inst, Vector q, int max_iters) {
  constexpr int kMemory = 10;
  q = project_all(inst, q);
  double f = welfare_sum_based(inst, q);
  std::vector<double> recent{f};
  Vector g = welfare_gradient(inst, QualityProfile(q));
  double step = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    if ((q - project_all(inst, q + g)).cwiseAbs().maxCoeff() < 1e-11) break;
    const double ref = *std::max_element(recent.begin(), recent.end());
    Vector next;
    double f_next = f;
    bool accepted = false;
    for (double t = step; t > 1e-20; t *= 0.5) {
      next = project_all(inst, q + t * g);
      f_next = welfare_sum_based(inst, next);
      if (f_next >= ref + 1e-4 * g.dot(next - q)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const Vector g_next = welfare_gradient(inst, QualityProfile(next));
    const Vector s = next - q;
    const double curvature = s.dot(g - g_next);
    step = curvature > 0.0 ? std::clamp(s.squaredNorm() / curvature, 1e-12, 1e12)
                           : std::min(2.0 * step, 1e12);
    const double moved = s.cwiseAbs().maxCoeff();
    q = std::move(next);
    g = g_next;
    f = f_next;
    recent.push_back(f);
    if (static_cast<int>(recent.size()) > kMemory) recent.erase(recent.begin());
    if (moved < 1e-15) break;
  }
  return q;
}

// Exact maximization of welfare over one player's qualities at a time.
Vector block_ascent(const Instance& inst, Vector q, int rounds) {
  const double tiny = std::max(inst.epsilon_floor(), 1e-300);
  std::vector<double> totals(static_cast<std::size_t>(inst.num_projects()));
  double f = welfare_sum_based(inst, q);
  for (int r = 0; r < rounds; ++r) {
    double change = 0.0;
    for (int i = 0; i < inst.num_players(); ++i) {
      const Player& pl = inst.player(i);
      std::fill(totals.begin(), totals.end(), 0.0);
      for (int e = 0; e < inst.num_edges(); ++e) {
        if (inst.edge(e).player != i) {
          totals[static_cast<std::size_t>(inst.edge(e).project)] += q[e];
        }
      }
      std::vector<AllocationCoordinate> coords(pl.edges.size());
      for (std::size_t s = 0; s < pl.edges.size(); ++s) {
        const Edge& edge = inst.edge(pl.edges[s]);
        const ValueFunction* vf = &inst.project(edge.project).value;
        const double others = totals[static_cast<std::size_t>(edge.project)];
        coords[s].gain_derivative = [vf, others, tiny](double x) {
          return vf->derivative(std::max(others + x, tiny));
        };
        coords[s].map = edge.map;
        if (pl.cost.is_hard()) coords[s].upper = edge.map.quality(pl.cost.budget);
      }
      const Vector qi = pl.cost.is_hard()
                            ? allocate_budget(coords, pl.cost.budget).q
                            : allocate_with_cost(coords, pl.cost).q;
      Vector trial = q;
      for (std::size_t s = 0; s < pl.edges.size(); ++s) {
        trial[pl.edges[s]] = qi[static_cast<Eigen::Index>(s)];
      }
      const double f_trial = welfare_sum_based(inst, trial);
      if (f_trial >= f) {
        change = std::max(change, (trial - q).cwiseAbs().maxCoeff());
        q = std::move(trial);
        f = f_trial;
      }
    }
    if (change < 1e-13) break;
  }
  return q;
}

bool all_max_quality(const Instance& inst) {
  return std::all_of(inst.projects().begin(), inst.projects().end(),
                     [](const Project& p) {
                       return p.value.kind() == ValueFunction::Kind::kMaxQuality;
                     });
}

// Odometer over per-player option lists, keeping the best welfare.
OptResult enumerate(const Instance& inst,
                    const std::vector<std::vector<Vector>>& options) {
  const int n = inst.num_players();
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  Vector q = Vector::Zero(inst.num_edges());
  auto place = [&](int i) {
    const auto& edges = inst.player(i).edges;
    const Vector& opt = options[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    for (std::size_t s = 0; s < edges.size(); ++s) q[edges[s]] = opt[static_cast<Eigen::Index>(s)];
  };
  for (int i = 0; i < n; ++i) place(i);
  OptResult best;
  best.value = -std::numeric_limits<double>::infinity();
  while (true) {
    const double w = welfare_any(inst, q);
    if (w > best.value) {
      best.value = w;
      best.profile = QualityProfile(q);
    }
    int i = 0;
    for (; i < n; ++i) {
      auto& k = idx[static_cast<std::size_t>(i)];
      if (++k < options[static_cast<std::size_t>(i)].size()) {
        place(i);
        break;
      }
      k = 0;
      place(i);
    }
    if (i == n) break;
  }
  return best;
}

void compositions(int parts, int units, bool exact, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == parts - 1) {
    if (exact) {
      cur.push_back(units);
      out.push_back(cur);
      cur.pop_back();
    } else {
      for (int u = 0; u <= units; ++u) {
        cur.push_back(u);
        out.push_back(cur);
        cur.pop_back();
      }
    }
    return;
  }
  for (int u = 0; u <= units; ++u) {
    cur.push_back(u);
    compositions(parts, units - u, exact, cur, out);
    cur.pop_back();
  }
}

// Largest quality any single edge can carry at a soft-cost optimum:
// beyond it even the first unit of value on the project is worth less than
// the player's own marginal cost.
double soft_quality_cap(const Instance& inst) {
  double cap = 1e-3;
  for (const Edge& edge : inst.edges()) {
    const CostModel& c = inst.player(edge.player).cost;
    const ValueFunction& vf = inst.project(edge.project).value;
    double q = 1e-3;
    while (q < 1e9 && vf.derivative(q) >
                          c.marginal_cost(edge.map.effort(q)) *
                              edge.map.marginal_effort(q)) {
      q *= 2.0;
    }
    cap = std::max(cap, q);
  }
  return cap;
}

}  // namespace

OptResult solve_opt(const Instance& inst, const SolverConfig& config) {
  config.validate();
  if (!inst.all_sum_based()) {
    if (all_max_quality(inst) && inst.all_hard_budget()) {
      // Convex objective: the maximum sits at a vertex of every player's
      // strategy set, i.e. each budget goes entirely to one project.
      std::vector<std::vector<Vector>> options;
      double cells = 1.0;
      for (const Player& pl : inst.players()) {
        std::vector<Vector> opts;
        for (std::size_t s = 0; s < pl.edges.size(); ++s) {
          Vector v = Vector::Zero(static_cast<Eigen::Index>(pl.edges.size()));
          v[static_cast<Eigen::Index>(s)] =
              inst.edge(pl.edges[s]).map.quality(pl.cost.budget);
          opts.push_back(v);
        }
        cells *= static_cast<double>(opts.size());
        options.push_back(std::move(opts));
      }
      if (cells > kMaxCells) throw InvalidInput("solve_opt: too many vertices");
      OptResult out = enumerate(inst, options);
      out.certified = true;
      return out;
    }
    throw InvalidInput(
        "solve_opt needs sum-based values; use brute_force_opt instead");
  }

  std::mt19937_64 rng(config.seed);
  Vector best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < kRestarts; ++r) {
    const QualityProfile start =
        r == 0 ? uniform_profile(inst) : random_start(inst, rng);
    const Vector q = projected_ascent(inst, start.values(), 5000);
    const double v = welfare_sum_based(inst, q);
    if (v > best_value) {
      best_value = v;
      best = q;
    }
  }
  if (kkt_residual(inst, best) >= 1e-10) best = block_ascent(inst, best, 30);

  OptResult out;
  out.kkt_residual = kkt_residual(inst, best);
  out.certified = out.kkt_residual < kCertifyResidual;
  out.value = welfare_sum_based(inst, best);
  out.profile = QualityProfile(std::move(best));
  return out;
}

OptResult brute_force_opt(const Instance& inst, int k) {
  if (k < 1 || k > 50) throw InvalidInput("brute_force_opt: k must be in [1, 50]");
  if (inst.num_edges() > 8) {
    throw InvalidInput("brute_force_opt: at most 8 participation pairs");
  }
  if (k == 1) {
    OptResult out;
    out.profile = uniform_profile(inst);
    out.value = welfare_any(inst, out.profile.values());
    return out;
  }
  const bool monotone = std::all_of(
      inst.projects().begin(), inst.projects().end(),
      [](const Project& p) { return p.value.monotone(); });
  const double soft_cap = inst.all_hard_budget() ? 0.0 : soft_quality_cap(inst);
  const int units = k - 1;

  std::vector<std::vector<Vector>> options;
  double cells = 1.0;
  for (const Player& pl : inst.players()) {
    const int m = static_cast<int>(pl.edges.size());
    std::vector<std::vector<int>> splits;
    std::vector<int> cur;
    std::vector<Vector> opts;
    if (pl.cost.is_hard()) {
      compositions(m, units, monotone, cur, splits);
      for (const auto& split : splits) {
        Vector v(m);
        for (int s = 0; s < m; ++s) {
          v[s] = inst.edge(pl.edges[static_cast<std::size_t>(s)])
                     .map.quality(pl.cost.budget * split[static_cast<std::size_t>(s)] / units);
        }
        opts.push_back(v);
      }
    } else {
      // Every edge independently on the lattice {0, h, ..., units * h}.
      double count = std::pow(static_cast<double>(k), m);
      if (count > kMaxCells) throw InvalidInput("brute_force_opt: grid too large");
      std::vector<int> digits(static_cast<std::size_t>(m), 0);
      while (true) {
        Vector v(m);
        for (int s = 0; s < m; ++s) v[s] = soft_cap * digits[static_cast<std::size_t>(s)] / units;
        opts.push_back(v);
        int s = 0;
        for (; s < m; ++s) {
          if (++digits[static_cast<std::size_t>(s)] <= units) break;
          digits[static_cast<std::size_t>(s)] = 0;
        }
        if (s == m) break;
      }
    }
    cells *= static_cast<double>(opts.size());
    if (cells > kMaxCells) throw InvalidInput("brute_force_opt: grid too large");
    options.push_back(std::move(opts));
  }
  return enumerate(inst, options);
}

}  // namespace collab
