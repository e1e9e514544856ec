#include <doctest.h>

#include <cmath>

#include "collab/bayes.hpp"
#include "collab/experiments.hpp"

using namespace collab;

namespace {

Instance single_sqrt_player() {
  RawInstance raw;
  raw.projects.push_back({"p1", ValueFunction::Sqrt(), std::nullopt});
  RawPlayer p;
  p.id = "a";
  p.cost = CostModel::Budget(1.0);
  p.projects.emplace_back("p1", EffortMap::Identity());
  raw.players.push_back(p);
  return validate_instance(raw);
}

TypeDistribution two_budgets(const Instance& inst) {
  TypeDistribution d;
  const EffortMap m = EffortMap::Identity();
  d.players.push_back({TypePoint{0.5, {CostModel::Budget(1.0), {m}}},
                       TypePoint{0.5, {CostModel::Budget(2.0), {m}}}});
  d.validate(inst);
  return d;
}

}  // namespace

TEST_CASE("type sampling") {
  const Instance inst = single_sqrt_player();
  const TypeDistribution deg = degenerate_distribution(inst);
  for (std::uint64_t s = 0; s < 5; ++s) CHECK(sample_type_profile(deg, s) == std::vector<int>{0});

  const TypeDistribution two = two_budgets(inst);
  std::mt19937_64 rng(17);
  int high = 0;
  for (int k = 0; k < 10000; ++k) high += sample_type_profile(two, rng)[0];
  CHECK(high / 10000.0 == doctest::Approx(0.5).epsilon(0.04));

  std::mt19937_64 a(3), b(3);
  for (int k = 0; k < 50; ++k) CHECK(sample_type_profile(two, a) == sample_type_profile(two, b));
}

TEST_CASE("expected optimum") {
  const Instance inst = single_sqrt_player();
  const TypeDistribution two = two_budgets(inst);
  CHECK(exact_expected_opt(inst, two) == doctest::Approx((1.0 + std::sqrt(2.0)) / 2.0));
  const Estimate est = expected_opt(inst, two, 4000, 5);
  CHECK(std::abs(est.mean - (1.0 + std::sqrt(2.0)) / 2.0) <= 4.0 * est.std_error + 1e-12);

  const Instance lin = learning_corpus()[0].second;
  const Estimate deg = expected_opt(lin, degenerate_distribution(lin), 3, 1);
  CHECK(deg.mean == solve_opt(lin).value);
  CHECK(deg.std_error == 0.0);

  const Estimate one = expected_opt(inst, two, 1, 8);
  const std::vector<int> t = sample_type_profile(two, std::uint64_t{8});
  CHECK(one.mean == doctest::Approx(solve_opt(instantiate(inst, two, t)).value));
}

TEST_CASE("degenerate Bayes learning reproduces complete-information play") {
  const Instance inst = learning_corpus()[0].second;
  SolverConfig cfg;
  cfg.horizon = 5000;
  cfg.seed = 4;
  const LearningTrace plain = no_regret_play(inst, cfg);
  const BayesLearningResult bayes =
      bayes_learning_welfare(inst, degenerate_distribution(inst), 5000, 4, cfg);
  CHECK(bayes.average_welfare == doctest::Approx(plain.average_welfare).epsilon(1e-3));
  CHECK(bayes.trace.average_welfare == plain.average_welfare);
}

TEST_CASE("Bayes learning on two types") {
  RawInstance raw;
  raw.projects.push_back({"p1", ValueFunction::Power(1.0, 0.5), std::nullopt});
  raw.projects.push_back({"p2", ValueFunction::Power(1.0, 0.5), std::nullopt});
  for (const char* id : {"a", "b"}) {
    RawPlayer p;
    p.id = id;
    p.cost = CostModel::Budget(1.0);
    p.projects.emplace_back("p1", EffortMap::Identity());
    p.projects.emplace_back("p2", EffortMap::Identity());
    raw.players.push_back(p);
  }
  const Instance inst = validate_instance(raw);
  TypeDistribution d;
  const EffortMap m = EffortMap::Identity();
  for (int i = 0; i < 2; ++i) {
    d.players.push_back({TypePoint{0.5, {CostModel::Budget(1.0), {m, m}}},
                         TypePoint{0.5, {CostModel::Budget(2.0), {m, m}}}});
  }
  const BayesLearningResult r = bayes_learning_welfare(inst, d, 100000, 2);
  CHECK(r.tail_welfare >= (0.5 - 0.03) * exact_expected_opt(inst, d));

  const Instance solo = single_sqrt_player();
  const BayesLearningResult s = bayes_learning_welfare(solo, two_budgets(solo), 20000, 3);
  CHECK(s.tail_welfare / exact_expected_opt(solo, two_budgets(solo)) ==
        doctest::Approx(1.0).epsilon(0.01));
}
