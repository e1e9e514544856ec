#include <doctest.h>

#include <cmath>

#include "collab/allocation.hpp"
#include "collab/analysis.hpp"
#include "collab/errors.hpp"
#include "collab/solvers.hpp"
#include "oracles.hpp"

using namespace collab;

namespace {

RawPlayer player(std::string id, CostModel cost,
                 std::vector<std::pair<std::string, EffortMap>> projects) {
  RawPlayer p;
  p.id = std::move(id);
  p.cost = cost;
  p.projects = std::move(projects);
  return p;
}

Instance one_player_two_projects(double alpha) {
  RawInstance raw;
  raw.projects.push_back({"p1", ValueFunction::Power(1.0, alpha), std::nullopt});
  raw.projects.push_back({"p2", ValueFunction::Power(1.0, alpha), std::nullopt});
  raw.players.push_back(player("a", CostModel::Budget(1.0),
                               {{"p1", EffortMap::Identity()}, {"p2", EffortMap::Identity()}}));
  return validate_instance(raw);
}

}  // namespace

TEST_CASE("best response against a fixed opponent") {
  const Instance inst = linear_cost_instance(2);
  QualityProfile q(inst);
  q[1] = 0.28125;
  const Vector br = best_response(inst, q, 0);
  const double ref = oracle::argmax_unimodal(
      [](double x) { return x / std::sqrt(x + 0.28125) - x; }, 0.0, 2.0);
  CHECK(std::abs(br[0] - ref) < 1e-7);
  CHECK(br[0] == doctest::Approx(0.28125).epsilon(1e-8));
}

TEST_CASE("best response of a lone budgeted player") {
  RawInstance raw;
  raw.projects.push_back({"p1", ValueFunction::Saturating(1.0, 2.0), std::nullopt});
  raw.players.push_back(player("a", CostModel::Budget(1.0), {{"p1", EffortMap::Identity()}}));
  const Instance inst = validate_instance(raw);
  CHECK(best_response(inst, QualityProfile(inst), 0)[0] == doctest::Approx(1.0));

  const Instance two = one_player_two_projects(0.5);
  const Vector split = best_response(two, QualityProfile(two), 0);
  const double ref = oracle::argmax_unimodal(
      [](double a) { return std::sqrt(a) + std::sqrt(1.0 - a); }, 0.0, 1.0);
  // golden section on a flat maximum resolves the argmax to about 1e-7
  CHECK(std::abs(split[0] - ref) < 1e-7);
  CHECK(std::abs(split[1] - (1.0 - ref)) < 1e-7);
}

TEST_CASE("best response dynamics on the linear cost family") {
  for (int n : {1, 2, 3, 5}) {
    const Instance inst = linear_cost_instance(n);
    const EquilibriumResult eq = br_dynamics(inst);
    REQUIRE(eq.converged);
    const double q_ref = oracle::symmetric_fixed_point(
        [](double x) { return std::sqrt(x); }, [](double x) { return x; }, n, 2.0);
    CHECK(std::abs(eq.profile.values().sum() - q_ref) < 1e-6);
    const double q = eq.profile.values().sum();
    CHECK(eq.welfare == doctest::Approx(std::sqrt(q) - q).epsilon(1e-7));
  }
  const EquilibriumResult two = br_dynamics(linear_cost_instance(2));
  CHECK(two.profile.values().sum() == doctest::Approx(0.5625).epsilon(1e-6));
  CHECK(two.welfare == doctest::Approx(0.1875).epsilon(1e-6));
}

TEST_CASE("best response dynamics on the lower bound instance") {
  const Instance inst = lower_bound_instance(4, 50.0, 1e-3);
  const EquilibriumResult eq = br_dynamics(inst);
  REQUIRE(eq.converged);
  CHECK(project_total(inst, eq.profile, 0) >= 0.999 * eq.profile.values().sum());
  CHECK(eq.welfare == doctest::Approx(1.0 - std::exp(-200.0)));
}

TEST_CASE("one player dynamics land on their optimum") {
  const Instance inst = one_player_two_projects(0.5);
  const EquilibriumResult eq = br_dynamics(inst);
  CHECK(eq.converged);
  CHECK(eq.welfare == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("iteration cap reports non-convergence") {
  SolverConfig cfg;
  cfg.max_iters = 1;
  const EquilibriumResult eq = br_dynamics(linear_cost_instance(4), cfg);
  CHECK_FALSE(eq.converged);
  CHECK(eq.last_change > cfg.tol_q);
}

TEST_CASE("no-regret play averages to the equilibrium") {
  SolverConfig cfg;
  cfg.horizon = 50000;
  const LearningTrace t = no_regret_play(linear_cost_instance(2), cfg);
  CHECK(t.average_profile.sum() == doctest::Approx(0.5625).epsilon(1e-2 / 0.5625));
  CHECK(t.average_welfare >= 0.48 * 0.25);

  const Instance one = one_player_two_projects(0.5);
  const LearningTrace solo = no_regret_play(one, cfg);
  CHECK(solo.tail_welfare == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("welfare optimum") {
  for (int n : {1, 2, 5, 9}) {
    const OptResult opt = solve_opt(linear_cost_instance(n));
    CHECK(opt.value == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(opt.profile.values().sum() == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(opt.certified);
  }
  const OptResult lb = solve_opt(lower_bound_instance(4, 50.0, 1e-3));
  const double beta = 1e-3;
  CHECK(lb.value >= 1.0 + 0.75 * 0.75 * (1.0 - std::exp(-beta)) / beta - 1e-9);

  RawInstance raw;
  raw.projects.push_back({"p1", ValueFunction::Power(1.0, 0.3), std::nullopt});
  raw.players.push_back(player("a", CostModel::Budget(1.0), {{"p1", EffortMap::Identity()}}));
  const OptResult one = solve_opt(validate_instance(raw));
  CHECK(one.value == doctest::Approx(1.0));
}

TEST_CASE("grid oracle agrees with the optimizer") {
  for (int n : {1, 2, 3}) {
    const Instance inst = linear_cost_instance(n);
    const OptResult exact = solve_opt(inst);
    const OptResult grid = brute_force_opt(inst, 50);
    CHECK(std::abs(grid.value - exact.value) <= 2.0 / 50 * exact.value);
  }
  const OptResult split = brute_force_opt(one_player_two_projects(0.5), 50);
  const double a = split.profile[0];
  CHECK(std::abs(a - 0.5) <= 1.0 / 49 + 1e-12);
  CHECK(split.profile[0] + split.profile[1] == doctest::Approx(1.0));

  const Instance one = one_player_two_projects(0.5);
  const OptResult single = brute_force_opt(one, 1);
  CHECK(single.profile[0] == doctest::Approx(0.5));
  CHECK(single.profile[1] == doctest::Approx(0.5));
}

TEST_CASE("symmetric single project closed forms") {
  CHECK(symmetric_single_project_eq(ValueFunction::Sqrt(), CostModel::Linear(), 2) ==
        doctest::Approx(0.5625).epsilon(1e-10));
  CHECK(symmetric_single_project_eq(ValueFunction::Sqrt(), CostModel::Linear(), 1) ==
        doctest::Approx(0.25).epsilon(1e-10));
  for (int n : {2, 3, 8}) {
    const double q = symmetric_single_project_eq(ValueFunction::SinglePeaked(4.0),
                                                 CostModel::Budget(1.0), n);
    const double ref = oracle::symmetric_fixed_point(
        [](double x) { return 4.0 * x * (1.0 - x); }, [](double) { return 0.0; }, n, 1.0);
    CHECK(std::abs(q - ref) < 1e-7);
    CHECK(q == doctest::Approx(n / (n + 1.0)).epsilon(1e-10));
    CHECK(q >= 1.0 - 1.0 / n);
  }
  for (int n : {1, 3, 10}) {
    CHECK(symmetric_single_project_opt(ValueFunction::Sqrt(), CostModel::Linear(), n) ==
          doctest::Approx(0.25).epsilon(1e-10));
  }
  CHECK_THROWS_WITH_AS(
      symmetric_single_project_opt(ValueFunction::Power(1.0, 1.0), CostModel::Linear(), 2),
      doctest::Contains("no interior optimum"), SolverError);

  const double x = symmetric_single_project_opt(ValueFunction::Sqrt(), CostModel::Power(1.0, 1.0), 1);
  const double ref = oracle::argmax_unimodal([](double t) { return std::sqrt(t) - t * t; }, 0.0, 2.0);
  CHECK(std::abs(x - ref) < 1e-7);
  CHECK(x == doctest::Approx(std::pow(0.25, 2.0 / 3.0)).epsilon(1e-10));
}

TEST_CASE("budget projection") {
  const Instance inst = one_player_two_projects(0.5);
  Vector y(2);
  y << 0.9, 0.5;
  const Vector p = project_player(inst, 0, y);
  CHECK(p[0] == doctest::Approx(0.7));
  CHECK(p[1] == doctest::Approx(0.3));
  y << 0.2, -1.0;
  const Vector inside = project_player(inst, 0, y);
  CHECK(inside[0] == doctest::Approx(0.2));
  CHECK(inside[1] == 0.0);
}

TEST_CASE("solver configuration is validated") {
  SolverConfig cfg;
  cfg.tol_q = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}
