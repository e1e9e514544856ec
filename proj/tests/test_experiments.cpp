#include <doctest.h>

#include <cmath>

#include "collab/errors.hpp"
#include "collab/experiments.hpp"

using namespace collab;

namespace {

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("unknown experiment") {
  ExperimentSpec spec;
  spec.name = "nope";
  CHECK_THROWS_AS(run_experiment(spec), InvalidInput);
}

TEST_CASE("reproduce rows carry predictions") {
  ExperimentSpec spec;
  spec.name = "linearcost";
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 5);
  for (const PoaReport& r : rows) {
    CHECK(r.pass);
    CHECK(r.predicted == doctest::Approx(r.n * r.n / (2.0 * r.n - 1.0)));
  }
  spec.name = "lowerbound";
  spec.n_list = {100};
  const auto lb = run_experiment(spec);
  REQUIRE(lb.size() == 1);
  CHECK(lb[0].predicted == doctest::Approx(1.0 + 0.99 * 0.99 * -std::expm1(-1e-3) / 1e-3));
  CHECK(std::abs(lb[0].ratio - lb[0].predicted) <= 0.02 * lb[0].predicted);
}

TEST_CASE("sweeps") {
  std::vector<double> alphas;
  for (int k = 1; k <= 10; ++k) alphas.push_back(0.1 * k);
  CHECK(run_sweep("symmetric", {{"alpha", alphas}}).size() == 10);
  CHECK(lines(to_csv(run_sweep("symmetric", {}))) == 1);

  const std::vector<double> ns{1, 2, 3, 4, 5};
  const std::vector<double> as{0.2, 0.4, 0.6, 0.8, 1.0};
  const auto rows = run_sweep("symmetric", {{"n", ns}, {"alpha", as}});
  REQUIRE(rows.size() == 25);
  CHECK(rows[0].instance == "symmetric[alpha=0.2;n=1]");
  CHECK(rows[1].instance == "symmetric[alpha=0.2;n=2]");
  CHECK(rows[5].instance == "symmetric[alpha=0.4;n=1]");
  CHECK(to_csv(rows) == to_csv(run_sweep("symmetric", {{"alpha", as}, {"n", ns}})));

  std::vector<double> big(101, 1.0);
  CHECK_THROWS_AS(run_sweep("linearcost", {{"n", big}, {"m", big}}), InvalidInput);
  CHECK_THROWS_AS(run_sweep("nope", {}), InvalidInput);
}
