#include <doctest.h>

#include <cmath>
#include <random>

#include "collab/sharing.hpp"
#include "oracles.hpp"

using namespace collab;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

std::vector<double> stdvec(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("proportional shares") {
  const Vector s = shares(SharingRule::Proportional(), ValueFunction::Sqrt(), vec({1, 3}));
  CHECK(s[0] == doctest::Approx(0.25 * 2.0));
  CHECK(s[1] == doctest::Approx(0.75 * 2.0));
  const Vector z = shares(SharingRule::Proportional(), ValueFunction::Power(2.0, 0.3), vec({0, 0}));
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);
}

TEST_CASE("winner take all") {
  const Vector s =
      shares(SharingRule::WinnerTakeAll(), ValueFunction::MaxQuality(), vec({1, 3, 2}));
  CHECK(s[0] == 0.0);
  CHECK(s[1] == doctest::Approx(3.0));
  CHECK(s[2] == 0.0);
}

TEST_CASE("exact Shapley shares match permutation enumeration") {
  auto max_v = [](const std::vector<double>& q) { return oracle::max_of(q); };
  const Vector q = vec({3, 1, 2});
  const Vector s = shapley_shares(ValueFunction::MaxQuality(), q, ShapleyMode::kExact);
  const std::vector<double> ref = oracle::shapley_by_permutations(max_v, stdvec(q));
  for (int i = 0; i < 3; ++i) CHECK(s[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  CHECK(s[0] == doctest::Approx(11.0 / 6.0));
  CHECK(s[1] == doctest::Approx(1.0 / 3.0));
  CHECK(s[2] == doctest::Approx(5.0 / 6.0));
  CHECK(s.sum() == doctest::Approx(3.0));

  const Vector sym = shapley_shares(ValueFunction::Sqrt(), vec({1, 1}), ShapleyMode::kExact);
  CHECK(sym[0] == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(sym[1] == doctest::Approx(std::sqrt(2.0) / 2.0));
  const Vector solo = shapley_shares(ValueFunction::Power(1.0, 0.5), vec({5}), ShapleyMode::kExact);
  CHECK(solo[0] == doctest::Approx(std::sqrt(5.0)));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const ValueFunction sat = ValueFunction::Saturating(1.3, 0.7);
  for (int t = 0; t < 20; ++t) {
    const Vector r = vec({u(rng), u(rng), u(rng), u(rng), u(rng)});
    const std::vector<double> ref5 = oracle::shapley_by_permutations(
        [&](const std::vector<double>& c) {
          double total = 0.0;
          for (double x : c) total += x;
          return 1.3 * (1.0 - std::exp(-0.7 * total));
        },
        stdvec(r));
    const Vector got = shapley_shares(sat, r, ShapleyMode::kExact);
    for (int i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(ref5[i]).epsilon(1e-10));
  }
}

TEST_CASE("sampled Shapley is unbiased and reproducible") {
  const Vector q = vec({3, 1, 2});
  const Vector a = shapley_shares(ValueFunction::MaxQuality(), q, ShapleyMode::kSampled, 20000, 4);
  const Vector b = shapley_shares(ValueFunction::MaxQuality(), q, ShapleyMode::kSampled, 20000, 4);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.sum() == doctest::Approx(3.0));
  CHECK(a[0] == doctest::Approx(11.0 / 6.0).epsilon(0.03));
  CHECK(a[1] == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}

TEST_CASE("harmonic coefficients") {
  CHECK(harmonic_coefficients(1)[0] == doctest::Approx(1.0));
  const Vector h2 = harmonic_coefficients(2);
  CHECK(h2[0] == doctest::Approx(2.0 / 3.0));
  CHECK(h2[1] == doctest::Approx(1.0 / 3.0));
  const Vector h3 = harmonic_coefficients(3);
  CHECK(h3[0] == doctest::Approx(6.0 / 11.0));
  CHECK(h3[1] == doctest::Approx(3.0 / 11.0));
  CHECK(h3[2] == doctest::Approx(2.0 / 11.0));
  for (int n : {4, 7, 12}) {
    const Vector h = harmonic_coefficients(n);
    CHECK(h.sum() == doctest::Approx(1.0));
    for (int t = 0; t < n; ++t) {
      CHECK(h[t] == doctest::Approx(1.0 / ((t + 1) * oracle::harmonic(n))));
    }
  }
}

TEST_CASE("marginal contribution property report") {
  const McReport prop = check_mc_property(SharingRule::Proportional(), ValueFunction::Sqrt(),
                                          vec({1, 3}));
  CHECK(prop.holds);
  CHECK(prop.entries[0].slack == doctest::Approx(0.5 - (2.0 - std::sqrt(3.0))));
  CHECK(prop.entries[1].slack == doctest::Approx(1.5 - 1.0));

  const McReport equal = check_mc_property(SharingRule::Ranking({0.5, 0.5}),
                                           ValueFunction::Power(1.0, 1.0), vec({9, 1}));
  CHECK_FALSE(equal.holds);
  CHECK(equal.entries[0].share == doctest::Approx(5.0));
  CHECK(equal.entries[0].marginal == doctest::Approx(9.0));

  const McReport wta = check_mc_property(SharingRule::WinnerTakeAll(),
                                         ValueFunction::MaxQuality(), vec({1, 3, 2}));
  CHECK(wta.holds);
  CHECK(wta.entries[1].marginal == doctest::Approx(1.0));
  CHECK(wta.entries[0].marginal == 0.0);
}

TEST_CASE("ranking approximation factor") {
  CHECK(ranking_approx_factor(ValueFunction::Sqrt(), vec({2.5})) <= 1.0 + 1e-12);
  const double f = ranking_approx_factor(ValueFunction::Sqrt(), vec({1, 3}));
  // second place: share (1/3) * 2 against MC (2 - sqrt 3) / H_2
  const double second = (2.0 - std::sqrt(3.0)) / (1.5 * (2.0 / 3.0));
  const double first = 1.0 / (1.5 * (4.0 / 3.0));
  CHECK(f == doctest::Approx(std::max(first, second)));
  CHECK(f <= 1.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const int n = 1 + static_cast<int>(u(rng) * 6);
    Vector q(n);
    for (int i = 0; i < n; ++i) q[i] = 3.0 * u(rng);
    const ValueFunction vf = c % 2 ? ValueFunction::Power(1.0 + u(rng), 0.1 + 0.9 * u(rng))
                                   : ValueFunction::Saturating(1.0, 0.2 + 2.0 * u(rng));
    worst = std::max(worst, ranking_approx_factor(vf, q));
  }
  CHECK(worst <= 1.0 + 1e-9);
}

TEST_CASE("rule names round trip") {
  for (const char* name : {"proportional", "marginal_proportional", "shapley_exact",
                           "ranking_harmonic", "winner_take_all"}) {
    CHECK(SharingRule::Parse(name).name() == name);
  }
  CHECK(SharingRule::Parse("shapley_sampled:500").samples == 500);
}

TEST_CASE("own-share curve derivative matches finite differences") {
  const Vector q = vec({0.7, 1.2, 0.4});
  for (const SharingRule& rule : {SharingRule::Proportional(), SharingRule::ShapleyExact(),
                                  SharingRule::MarginalProportional()}) {
    const ValueFunction vf = ValueFunction::Saturating(2.0, 0.8);
    const OwnShareCurve curve(rule, vf, q, 1);
    for (double own : {0.3, 1.0, 2.0}) {
      const double h = 1e-6;
      const double fd = (curve.value(own + h) - curve.value(own - h)) / (2 * h);
      CHECK(curve.derivative(own) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}
