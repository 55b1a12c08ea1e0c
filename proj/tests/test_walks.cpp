#include <cmath>

#include "doctest.h"
#include "frontlab/kernel.hpp"
#include "frontlab/walks.hpp"

using namespace frontlab;

namespace {

// centered walk from the tilted Bernoulli kernel (mu = 1, f'(0) = 1)
DriftWalkSpec tilted_bernoulli(double D, double t) {
  const double lam = 1.199678640257734;
  const double nu = std::cosh(lam);
  const double km = std::exp(lam) / (2.0 * nu);   // Kbar mass at -1
  const double kp = std::exp(-lam) / (2.0 * nu);  // Kbar mass at +1
  return DriftWalkSpec{nu, KernelMeasure({{-1.0, km}, {1.0, kp}}, {}),
                       std::sinh(lam), D, t, 2.0};
}

DriftWalkSpec symmetric_walk(double t) {
  return DriftWalkSpec{1.0, KernelMeasure({{-1.0, 0.5}, {1.0, 0.5}}, {}), 0.0,
                       0.0, t, 2.0};
}

}  // namespace

TEST_CASE("spec validation enforces the centering identity") {
  CHECK_NOTHROW(tilted_bernoulli(0.0, 4.0).validate());
  CHECK_NOTHROW(symmetric_walk(4.0).validate());
  DriftWalkSpec bad = symmetric_walk(4.0);
  bad.drift_c = 0.5;  // nu * mean(Kbar) + c != 0
  CHECK_THROWS(bad.validate());
}

TEST_CASE("degenerate path functionals") {
  const auto spec = tilted_bernoulli(0.0, 0.0);
  // t = 0: indicator of x in (L, 2L)
  CHECK(sample_path_functional(spec, 3.0, 100, 1).value == doctest::Approx(1.0));
  CHECK(sample_path_functional(spec, 5.0, 100, 1).value == doctest::Approx(0.0));
  // x = 0 dies immediately (strict positivity)
  const auto spec4 = tilted_bernoulli(0.0, 4.0);
  CHECK(sample_path_functional(spec4, 0.0, 500, 1).value == doctest::Approx(0.0));
}

TEST_CASE("survival probabilities are monotone in the start point") {
  const auto spec = symmetric_walk(16.0);
  const auto p2 = hitting_tail(spec, 2.0, 16.0, 40000, 7);
  const auto p4 = hitting_tail(spec, 4.0, 16.0, 40000, 7);
  const auto p8 = hitting_tail(spec, 8.0, 16.0, 40000, 7);
  CHECK(p2.value < p4.value);
  CHECK(p4.value < p8.value);
}

TEST_CASE("far starts almost never hit the origin") {
  // Var X_16 = nu E[jump^2] * 16 = 16, sd = 4; x = 40 is 10 sd away
  const auto spec = symmetric_walk(16.0);
  CHECK(hitting_tail(spec, 40.0, 16.0, 5000, 3).value >= 0.98);
}

TEST_CASE("zero log-drift reduces the barrier walk to the plain one") {
  auto spec = symmetric_walk(16.0);
  spec.D = 0.0;
  const auto plain = hitting_tail(spec, 3.0, 16.0, 20000, 9);
  for (auto v : {BarrierVariant::F1Plus, BarrierVariant::F1Minus,
                 BarrierVariant::F2Plus, BarrierVariant::F2Minus}) {
    const auto drift = drift_hitting_tail(spec, v, 3.0, 16.0, 20000, 9);
    CHECK(drift.value == doctest::Approx(plain.value).epsilon(1e-12));
  }
}

TEST_CASE("pathwise ordering of barrier hitting times") {
  const auto spec = tilted_bernoulli(-1.25, 64.0);
  const auto rep = ordering_check(spec, 3.0, 32.0, 20000, 17);
  CHECK(rep.violations == 0);
  // sandwich of the estimates themselves
  CHECK(rep.f1_minus.value <= rep.t_tail.value + 1e-12);
  CHECK(rep.f2_minus.value <= rep.t_tail.value + 1e-12);
  CHECK(rep.t_tail.value <= rep.f1_plus.value + 1e-12);
  CHECK(rep.t_tail.value <= rep.f2_plus.value + 1e-12);
}

TEST_CASE("hitting tail scales like x/sqrt(s)") {
  const auto spec = symmetric_walk(1.0);
  const auto a = hitting_tail(spec, 2.0, 64.0, 60000, 21);
  const auto b = hitting_tail(spec, 2.0, 256.0, 60000, 22);
  // quadrupling s should halve the tail, within MC noise
  const double ratio = a.value / b.value;
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.4);
}

TEST_CASE("ballot band report is populated and serializable") {
  const auto spec = tilted_bernoulli(-1.25, 1.0);
  const auto rep = ballot_band_check(spec, {16.0}, {2.0, 4.0}, 30000, 31);
  REQUIRE(rep.points.size() == 2);
  for (const auto& p : rep.points) {
    CHECK(p.z_hat > 0.0);
    CHECK(p.ratio > 0.0);
    CHECK(!p.inconclusive);
  }
  CHECK(rep.ratio_min <= rep.ratio_max);
  CHECK(!rep.to_json().empty());
}

TEST_CASE("estimates are seed-deterministic") {
  const auto spec = tilted_bernoulli(-1.25, 16.0);
  const auto a = sample_path_functional(spec, 2.0, 5000, 77);
  const auto b = sample_path_functional(spec, 2.0, 5000, 77);
  CHECK(a.value == b.value);
}
