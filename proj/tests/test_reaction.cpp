#include <cmath>

#include "doctest.h"
#include "frontlab/reaction.hpp"

using namespace frontlab;

TEST_CASE("closed-form families evaluate correctly") {
  const auto f = Reaction::logistic(1.0);
  CHECK(f(0.5) == doctest::Approx(0.25));
  CHECK(f(0.0) == 0.0);
  CHECK(f(1.0) == 0.0);
  CHECK(f.fprime0() == 1.0);

  const auto g = Reaction::minus_power(2.0, 3.0);
  CHECK(g(0.5) == doctest::Approx(2.0 * (0.5 - 0.125)));
  CHECK(g.fprime0() == 2.0);
}

TEST_CASE("offspring reaction: binary branching is the logistic") {
  OffspringLaw d2{{{2, 1.0}}};
  const auto f = Reaction::from_offspring(1.0, d2);
  // r [1 - u - g(1-u)] with g(s) = s^2 equals u - u^2
  for (double u = 0.0; u <= 1.0; u += 0.125)
    CHECK(f(u) == doctest::Approx(u - u * u).epsilon(1e-14));
  CHECK(f.fprime0() == doctest::Approx(1.0));
}

TEST_CASE("offspring law moments and pgf") {
  OffspringLaw k{{{2, 0.4}, {3, 0.6}}};
  k.validate();
  CHECK(k.mean() == doctest::Approx(2.6));
  CHECK(k.pgf(0.5) == doctest::Approx(0.4 * 0.25 + 0.6 * 0.125));
  CHECK_THROWS(OffspringLaw{{{1, 1.0}}}.validate());
  CHECK_THROWS((OffspringLaw{{{2, 0.5}, {3, 0.4}}}).validate());
}

TEST_CASE("probabilistic decomposition round trip") {
  OffspringLaw k{{{2, 0.4}, {4, 0.6}}};
  const double r = 1.7;
  const auto f = Reaction::from_offspring(r, k);
  const auto dec = probabilistic_decompose(f);
  REQUIRE(dec.has_value());
  CHECK(dec->r == doctest::Approx(r).epsilon(1e-10));
  REQUIRE(dec->kappa.probabilities.size() == 2);
  CHECK(dec->kappa.probabilities[0].first == 2);
  CHECK(dec->kappa.probabilities[0].second == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(dec->kappa.probabilities[1].first == 4);
  CHECK(dec->kappa.probabilities[1].second == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(f.fprime0() == doctest::Approx(r * (k.mean() - 1.0)));
}

TEST_CASE("u - u^3 is not probabilistic") {
  const auto f = Reaction::minus_power(1.0, 3.0);
  std::string reason;
  const auto dec = probabilistic_decompose(f, &reason);
  CHECK(!dec.has_value());
  CHECK(!reason.empty());
  // the induced series is (3/2) s^2 - (1/2) s^3: the negative cubic term
  CHECK(reason.find("negative") != std::string::npos);
}

TEST_CASE("u - u^2 decomposes to binary branching at unit rate") {
  const auto f = Reaction::logistic(1.0);
  const auto dec = probabilistic_decompose(f);
  REQUIRE(dec.has_value());
  CHECK(dec->r == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(dec->kappa.probabilities.size() == 1);
  CHECK(dec->kappa.probabilities[0].first == 2);
}

TEST_CASE("polynomial coefficients") {
  const auto f = Reaction::logistic(1.5);
  REQUIRE(f.is_polynomial());
  const auto c = f.poly_coeffs();
  REQUIRE(c.size() == 3);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == doctest::Approx(1.5));
  CHECK(c[2] == doctest::Approx(-1.5));
}

TEST_CASE("KPP validation accepts the standard families") {
  for (const auto& f : {Reaction::logistic(1.0), Reaction::minus_power(1.0, 2.0),
                        Reaction::minus_power(0.5, 4.0)}) {
    const auto rep = f.validate();
    CHECK(rep.f1_pass);
    CHECK(rep.f2_pass);
    CHECK(rep.f3_pass);
    CHECK(rep.holder_gamma >= 0.9);
  }
}

TEST_CASE("KPP validation flags a super-linear reaction") {
  // f(u) = u + 2u^2 - 3u^3 exceeds f'(0) u inside (0,1)
  const auto f = Reaction::polynomial({0.0, 1.0, 2.0, -3.0});
  const auto rep = f.validate();
  CHECK(rep.f2_pass);
  CHECK(!rep.f3_pass);
  CHECK(rep.worst_f3_excess > 0.0);
}

TEST_CASE("json round trip") {
  OffspringLaw k{{{2, 0.3}, {5, 0.7}}};
  const auto f = Reaction::from_offspring(0.8, k);
  const auto f2 = Reaction::from_json(f.to_json());
  for (double u = 0.0; u <= 1.0; u += 0.2)
    CHECK(f2(u) == doctest::Approx(f(u)).epsilon(1e-15));
  CHECK(f2.fprime0() == doctest::Approx(f.fprime0()).epsilon(1e-15));
}
