#include <doctest.h>

#include <cmath>
#include <random>

#include "collab/analysis.hpp"
#include "collab/errors.hpp"
#include "oracles.hpp"

using namespace collab;

TEST_CASE("k function branches") {
  CHECK(k_fun(1.0, 1.0) == doctest::Approx(0.25));
  CHECK(k_fun(1.0, 4.0) == doctest::Approx(3.0));
  CHECK(k_fun(0.0, 3.0) == 0.0);
}

TEST_CASE("k fact holds on random splits") {
  const KFactReport r = check_k_fact(20000, 11);
  CHECK(r.passes());
  CHECK(r.tight_first >= 1);
  CHECK(r.tight_second >= 1);

  // brute force: a single coordinate is tight on the lower branch
  CHECK(1.0 * (4.0 - 1.0) == doctest::Approx(k_fun(1.0, 4.0)));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    double x_sum = 0.0, y_sum = 0.0, lhs = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double x = u(rng), y = 2.0 * u(rng);
      x_sum += x;
      y_sum += y;
      lhs += x * (y - x);
    }
    const double k = x_sum >= y_sum / 2 ? y_sum * y_sum / 4 : x_sum * (y_sum - x_sum);
    CHECK(lhs <= k + 1e-12);
  }
}

TEST_CASE("h at the optimal pair") {
  CHECK(h_alpha(0.0, 1.7, 0.3, 0.5).value == doctest::Approx(0.3));
  const HValue at2 = h_alpha(2.0, std::sqrt(2.0), 0.5, 0.5);
  CHECK(at2.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(at2.upper_branch);
  // the tail branch at z = 2 differs from the quadratic branch by 1 - alpha
  CHECK(at2.other_branch - at2.value == doctest::Approx(-(1.0 - 0.5) + 0.0).epsilon(1e-12));
}

TEST_CASE("analytic PoA") {
  CHECK(poa_alpha_analytic(1.0).guarantee == doctest::Approx(1.0));
  const PoaAlpha half = poa_alpha_analytic(0.5);
  CHECK(half.poa == doctest::Approx(1.5 / std::sqrt(2.0)));
  CHECK(half.guarantee == doctest::Approx(0.94281).epsilon(1e-5));
  CHECK(poa_alpha_analytic(0.25).poa == doctest::Approx(1.75 / std::pow(2.0, 0.75)));
  CHECK_THROWS_AS(poa_alpha_analytic(0.0), InvalidInput);

  const GuaranteeMinimum m = min_guarantee();
  const double ref = oracle::argmax_unimodal(
      [](double a) { return -std::pow(2.0, 1.0 - a) / (2.0 - a); }, 1e-9, 1.0);
  CHECK(m.alpha == doctest::Approx(ref).epsilon(1e-6));
  CHECK(m.guarantee >= 0.94);
  CHECK(m.guarantee == doctest::Approx(std::pow(2.0, 1.0 - ref) / (2.0 - ref)));
}

TEST_CASE("numeric PoA at alpha = 1") {
  CHECK(poa_alpha_numeric(1.0).poa == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("numeric elasticity") {
  CHECK(elasticity_numeric([](double x) { return 3.0 * std::pow(x, 0.4); }, 2.0) ==
        doctest::Approx(0.4).epsilon(1e-6));
  CHECK(elasticity_numeric([](double x) { return 2.0 * std::pow(x, 1.5); }, 0.7) ==
        doctest::Approx(1.5).epsilon(1e-6));
  CHECK(elasticity_numeric([](double x) { return -std::expm1(-x); }, 1e-6) ==
        doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("lower bound prediction") {
  const double beta = 1e-3;
  auto formula = [&](int n) {
    const double s = 1.0 - 1.0 / n;
    return 1.0 + s * s * (1.0 - std::exp(-beta)) / beta;
  };
  CHECK(lower_bound_prediction(2, 50.0, beta).ratio == doctest::Approx(formula(2)));
  CHECK(lower_bound_prediction(2, 50.0, beta).ratio == doctest::Approx(1.24988).epsilon(1e-5));
  CHECK(lower_bound_prediction(100, 50.0, beta).ratio == doctest::Approx(1.0 + 0.99 * 0.99 * -std::expm1(-1e-3) / 1e-3));
  CHECK(lower_bound_prediction(100000, 50.0, 1e-9).ratio == doctest::Approx(2.0).epsilon(1e-4));

  const Instance inst = lower_bound_instance(4, 50.0, beta);
  const QualityProfile w = lower_bound_witness(inst);
  CHECK(social_welfare(w, inst) ==
        doctest::Approx(lower_bound_prediction(4, 50.0, beta).opt_lower_bound));
}

TEST_CASE("linear cost ratio") {
  CHECK(linear_cost_poa(1) == doctest::Approx(1.0));
  CHECK(linear_cost_poa(2) == doctest::Approx(0.25 / (3.0 / 16.0)));
  CHECK(linear_cost_poa(10) == doctest::Approx(100.0 / 19.0));
}

TEST_CASE("soft budget bounds") {
  CHECK(soft_budget_bounds(1.0).welfare == doctest::Approx(1.0 / 3.0));
  CHECK(soft_budget_bounds(1.0).production == doctest::Approx(0.25));
  CHECK(soft_budget_bounds(0.5).welfare == doctest::Approx(0.25));
  CHECK(soft_budget_bounds(0.5).production == doctest::Approx(1.0 / 6.0));
  CHECK(soft_budget_bounds(1e12).welfare == doctest::Approx(0.5));
  CHECK(soft_budget_bounds(INFINITY).production == 0.5);
  CHECK_THROWS_AS(soft_budget_bounds(0.0), InvalidInput);
}

TEST_CASE("non-monotone family") {
  const ValueFunction vf = ValueFunction::SinglePeaked(4.0);
  const NonmonotoneBound three = nonmonotone_poa_bound(vf, 3);
  CHECK(three.q_eq == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(three.realized_poa == doctest::Approx(16.0 / 12.0).epsilon(1e-9));
  CHECK(three.bound == doctest::Approx(0.75));
  CHECK(three.realized_poa >= three.bound);
  const NonmonotoneBound eight = nonmonotone_poa_bound(vf, 8);
  CHECK(eight.q_eq == doctest::Approx(8.0 / 9.0).epsilon(1e-10));
  CHECK(eight.eq_above);
}

TEST_CASE("welfare plus production slack") {
  const Instance inst = linear_cost_instance(2);
  QualityProfile q(inst);
  q[0] = q[1] = 0.28125;
  CHECK(welfare_plus_production_slack(inst, q, 0.25) ==
        doctest::Approx(0.1875 + 0.75 - 0.25));

  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    const Instance soft = random_soft_cost_instance(1.0, rng, 3, 1);
    const EquilibriumResult eq = br_dynamics(soft);
    const OptResult opt = solve_opt(soft);
    CHECK(welfare_plus_production_slack(soft, eq.profile, opt.value) >= -1e-8);
  }
}

TEST_CASE("smoothness holds for proportional sharing") {
  std::mt19937_64 rng(2);
  const Instance inst = random_submodular_instance(ValueFamily::kConcaveOfSum,
                                                   SharingRule::Proportional(), rng);
  const SmoothnessReport r = check_universal_smoothness(
      inst, {1.0, 1.0}, random_feasible_profiles(inst, 200, 3));
  CHECK(r.passes);
  CHECK(r.violations == 0);
}

TEST_CASE("equal split breaks smoothness") {
  RawInstance raw;
  raw.sharing = SharingRule::Ranking({0.5, 0.5});
  raw.projects.push_back({"p1", ValueFunction::Power(1.0, 1.0), std::nullopt});
  for (const char* id : {"a", "b"}) {
    RawPlayer p;
    p.id = id;
    p.cost = CostModel::Budget(id[0] == 'a' ? 9.0 : 1.0);
    p.projects.emplace_back("p1", EffortMap::Identity());
    raw.players.push_back(p);
  }
  const Instance inst = validate_instance(raw);
  QualityProfile dev(inst);
  dev[0] = 9.0;
  dev[1] = 1.0;
  QualityProfile test(inst);
  test[1] = 1.0;
  const SmoothnessReport r = check_universal_smoothness(inst, {1.0, 1.0}, dev, {test});
  CHECK_FALSE(r.passes);
  CHECK(r.min_slack < 0.0);
}

TEST_CASE("one player smoothness slack is mu times welfare") {
  RawInstance raw;
  raw.projects.push_back({"p1", ValueFunction::Sqrt(), std::nullopt});
  RawPlayer p;
  p.id = "a";
  p.cost = CostModel::Budget(1.0);
  p.projects.emplace_back("p1", EffortMap::Identity());
  raw.players.push_back(p);
  const Instance inst = validate_instance(raw);
  QualityProfile q(inst);
  q[0] = 1.0;
  const SmoothnessReport r = check_universal_smoothness(inst, {1.0, 1.0}, q, {q});
  CHECK(r.min_slack == doctest::Approx(1.0));
}

TEST_CASE("csv rows") {
  PoaReport r;
  r.instance = "x";
  r.rule = "proportional";
  r.n = 2;
  r.ratio = 4.0 / 3.0;
  r.pass = true;
  CHECK(to_csv_row(r) == "x,proportional,2,0,0,0,1.333333333,0,0,true");
  CHECK(poa_csv_header() ==
        "instance,rule,n,param,eq_welfare,opt_welfare,ratio,predicted,bound,pass");
}
