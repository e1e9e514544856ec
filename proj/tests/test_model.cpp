#include <doctest.h>

#include <cmath>

#include "collab/errors.hpp"
#include "collab/instance.hpp"
#include "collab/instance_io.hpp"

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

RawInstance two_by_two() {
  RawInstance raw;
  raw.projects.push_back({"p1", ValueFunction::Power(1.0, 0.5), std::nullopt});
  raw.projects.push_back({"p2", ValueFunction::Power(1.0, 0.5), std::nullopt});
  for (const char* id : {"a", "b"}) {
    raw.players.push_back(player(id, CostModel::Budget(1.0),
                                 {{"p1", EffortMap::Identity()}, {"p2", EffortMap::Identity()}}));
  }
  return raw;
}

Instance sqrt_linear(int n) {
  RawInstance raw;
  raw.projects.push_back({"p1", ValueFunction::Sqrt(), std::nullopt});
  for (int i = 0; i < n; ++i) {
    raw.players.push_back(player("i" + std::to_string(i), CostModel::Linear(),
                                 {{"p1", EffortMap::Identity()}}));
  }
  return validate_instance(raw);
}

}  // namespace

TEST_CASE("validate_instance builds the participation index") {
  const Instance inst = validate_instance(two_by_two());
  CHECK(inst.num_players() == 2);
  CHECK(inst.num_projects() == 2);
  CHECK(inst.num_edges() == 4);
  CHECK(inst.edge_index(1, 0) >= 0);
  CHECK(inst.all_hard_budget());
}

TEST_CASE("validate_instance rejects bad input") {
  RawInstance raw = two_by_two();
  raw.players[0].projects.emplace_back("p9", EffortMap::Identity());
  CHECK_THROWS_WITH_AS(validate_instance(raw), doctest::Contains("unknown project"),
                       InvalidInput);
  CHECK_THROWS_WITH_AS(ValueFunction::Power(1.0, 1.5),
                       doctest::Contains("alpha out of range"), InvalidInput);
  CHECK_THROWS_AS(CostModel::Budget(-1.0).validate(), InvalidInput);
}

TEST_CASE("effort maps") {
  CHECK(effort_of_quality(EffortMap::Linear(2.0), 4.0) == doctest::Approx(2.0));
  CHECK(effort_of_quality(EffortMap::Power(1.0, 2.0), 3.0) == doctest::Approx(9.0));
  CHECK(effort_of_quality(EffortMap::Linear(0.3), 0.0) == 0.0);
  CHECK(effort_of_quality(EffortMap::Power(2.5, 1.7), 0.0) == 0.0);
}

TEST_CASE("feasibility and slack") {
  const Instance inst = validate_instance(two_by_two());
  QualityProfile q(inst);
  q.set(inst, 0, 0, 0.5);
  q.set(inst, 0, 1, 0.5);
  FeasibilityReport r = is_feasible(q, inst);
  CHECK(r.feasible);
  CHECK(r.slack[0] == doctest::Approx(0.0));
  q.set(inst, 0, 0, 0.8);
  q.set(inst, 0, 1, 0.4);
  CHECK_FALSE(is_feasible(q, inst).feasible);

  const Instance soft = sqrt_linear(2);
  QualityProfile big(soft);
  big[0] = 1e6;
  big[1] = 3e5;
  CHECK(is_feasible(big, soft).feasible);
}

TEST_CASE("project values") {
  Vector q(2);
  q << 1.0, 3.0;
  CHECK(project_value(ValueFunction::Power(1.0, 0.5), q) == doctest::Approx(2.0));
  Vector one(1);
  one << 1.0;
  CHECK(project_value(ValueFunction::Saturating(1.0, 1.0), one) ==
        doctest::Approx(1.0 - std::exp(-1.0)));
  Vector three(3);
  three << 1.0, 3.0, 2.0;
  CHECK(project_value(ValueFunction::MaxQuality(), three) == doctest::Approx(3.0));
}

TEST_CASE("marginal contribution") {
  Vector q(2);
  q << 1.0, 3.0;
  CHECK(marginal_contribution(ValueFunction::Power(1.0, 0.5), q, 0) ==
        doctest::Approx(2.0 - std::sqrt(3.0)));
  Vector three(3);
  three << 1.0, 3.0, 2.0;
  CHECK(marginal_contribution(ValueFunction::MaxQuality(), three, 1) ==
        doctest::Approx(3.0 - 2.0));
  q << 0.0, 3.0;
  CHECK(marginal_contribution(ValueFunction::Sqrt(), q, 0) == 0.0);
  CHECK(marginal_contribution(ValueFunction::MaxQuality(), three, 0) == 0.0);
}

TEST_CASE("social welfare, production and cost") {
  RawInstance raw;
  raw.projects.push_back({"p1", ValueFunction::Power(1.0, 0.5), std::nullopt});
  raw.players.push_back(player("a", CostModel::Budget(1.0), {{"p1", EffortMap::Identity()}}));
  const Instance single = validate_instance(raw);
  QualityProfile q1(single);
  q1[0] = 1.0;
  CHECK(social_welfare(q1, single) == doctest::Approx(1.0));

  const Instance inst = sqrt_linear(2);
  QualityProfile q(inst);
  q[0] = q[1] = 0.28125;
  CHECK(social_welfare(q, inst) == doctest::Approx(std::sqrt(0.5625) - 0.5625));
  const ProductionCost pc = production_and_cost(q, inst);
  CHECK(pc.production == doctest::Approx(0.75));
  CHECK(pc.cost == doctest::Approx(0.5625));
  CHECK_FALSE(pc.hard_budget);

  const QualityProfile zero(inst);
  CHECK(social_welfare(zero, inst) == 0.0);
  const ProductionCost pz = production_and_cost(zero, inst);
  CHECK(pz.production == 0.0);
  CHECK(pz.cost == 0.0);

  const Instance hard = validate_instance(two_by_two());
  const ProductionCost ph = production_and_cost(uniform_profile(hard), hard);
  CHECK(ph.hard_budget);
  CHECK(ph.cost == 0.0);
}

TEST_CASE("instance files") {
  const std::string good = R"({
    "sharing": "proportional",
    "projects": [{"id": "p1", "value": {"kind": "sqrt"}}],
    "players": [
      {"id": "a", "cost": {"kind": "linear"},
       "projects": {"p1": {"map_kind": "linear_ability", "params": {"ability": 1}}}}
    ],
    "solver": {"max_iters": 7, "tol": 1e-6}
  })";
  const InstanceFile f = parse_instance_file(good);
  CHECK(f.solver.max_iters == 7);
  CHECK(f.solver.tol_q == doctest::Approx(1e-6));
  CHECK(validate_instance(f.raw).num_players() == 1);

  CHECK_THROWS_WITH_AS(parse_instance_file("{\n  \"projects\": [\n  }"),
                       doctest::Contains("line 3"), InvalidInput);
  CHECK_THROWS_WITH_AS(
      parse_instance_file(R"({"projects": [{"id": "p1", "value": {"kind": "cubic"}}], "players": []})"),
      doctest::Contains("projects[0].value.kind"), InvalidInput);
  CHECK_THROWS_AS(parse_instance_file(R"({"projects": [], "players": [], "solver": {"tol": -1}})"),
                  InvalidInput);
}
