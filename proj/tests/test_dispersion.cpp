#include <cmath>

#include "doctest.h"
#include "frontlab/dispersion.hpp"
#include "frontlab/kernel.hpp"

using namespace frontlab;

namespace {

// independent minimizer: golden-section on the closed-form Bernoulli
// Gamma(lambda) = cosh(lambda)/lambda, in extended precision so the
// flatness floor sits below 1e-9
long double golden_min_bernoulli(long double lo, long double hi) {
  const long double g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  auto gamma = [](long double l) { return std::cosh(l) / l; };
  long double a = lo, b = hi;
  long double c = b - g * (b - a), d = a + g * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (gamma(c) < gamma(d))
      b = d;
    else
      a = c;
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5L * (a + b);
}

}  // namespace

TEST_CASE("symmetric Bernoulli: lambda* and c* against golden section") {
  const KernelMeasure b({{-1.0, 0.5}, {1.0, 0.5}}, {});
  const auto [lam, c] = minimize_gamma(b, 1.0, 1.0);
  const double lam_ref = static_cast<double>(golden_min_bernoulli(0.5L, 3.0L));
  CHECK(lam == doctest::Approx(lam_ref).epsilon(1e-9));
  CHECK(lam == doctest::Approx(1.199678640257734).epsilon(1e-10));
  // at the minimizer, c* = Gamma(lambda*) = sinh(lambda*) here
  CHECK(c == doctest::Approx(std::sinh(lam)).epsilon(1e-12));
  CHECK(c == doctest::Approx(1.5088795615383201).epsilon(1e-10));
  CHECK(gamma_crit_residual(b, 1.0, 1.0, lam) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("regular with negative speed: delta_-1 at f'(0) = 1/2") {
  const auto d = KernelMeasure::delta(-1.0);
  CHECK(classify(d, 1.0, 0.5) == Classification::Regular);
  const auto [lam, c] = minimize_gamma(d, 1.0, 0.5);
  // critical point: (lambda + 1) e^{-lambda} = 1/2
  CHECK((lam + 1.0) * std::exp(-lam) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(c < 0.0);
  CHECK(c == doctest::Approx((std::exp(-lam) - 0.5) / lam).epsilon(1e-10));
  const auto rep = dispersion_report(d, 1.0, 0.5);
  CHECK(rep.negative_speed);
}

TEST_CASE("trichotomy labels and Xi") {
  const auto u = KernelMeasure::uniform(-1.0, 1.0);
  const auto d = KernelMeasure::delta(-1.0);
  CHECK(classify(u, 1.0, 1.0) == Classification::Regular);  // rightward mass
  CHECK(classify(d, 1.0, 0.5) == Classification::Regular);  // f'(0) < mu
  CHECK(classify(d, 1.0, 2.0) == Classification::Trapping);
  CHECK(classify(d, 1.0, 1.0) == Classification::Critical);
  CHECK(dispersion_report(d, 1.0, 2.0).Xi == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(dispersion_report(d, 1.0, 1.0).Xi == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dispersion_report(d, 2.0, 0.5).Xi ==
        doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
}

TEST_CASE("classification rejects kernels with mass at zero") {
  const KernelMeasure raw({{0.0, 0.5}, {-1.0, 0.5}}, {}, true);
  CHECK_THROWS(classify(raw, 1.0, 1.0));
}

TEST_CASE("critical-point residual is strictly increasing") {
  const auto u = KernelMeasure::uniform(-1.0, 1.0);
  double prev = gamma_crit_residual(u, 1.0, 1.0, 0.05);
  for (double lam = 0.3; lam < 6.0; lam += 0.25) {
    const double cur = gamma_crit_residual(u, 1.0, 1.0, lam);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("scaling covariance: (a mu, a f'(0)) scales c* by a") {
  const auto u = KernelMeasure::uniform(-1.0, 1.0);
  const auto [lam1, c1] = minimize_gamma(u, 1.0, 1.0);
  const auto [lam2, c2] = minimize_gamma(u, 3.0, 3.0);
  CHECK(lam2 == doctest::Approx(lam1).epsilon(1e-9));
  CHECK(c2 == doctest::Approx(3.0 * c1).epsilon(1e-9));
}

TEST_CASE("discrete dictionary: R(lambda)/lambda equals Gamma(lambda)") {
  const KernelMeasure b({{-1.0, 0.5}, {1.0, 0.5}}, {});
  const auto dt = discrete_translation(b, 1.3, 0.7);
  for (double lam = 0.2; lam < 4.0; lam += 0.6)
    CHECK(dt.R(lam) / lam ==
          doctest::Approx(gamma_dispersion(b, 1.3, 0.7, lam)).epsilon(1e-12));
  const auto [lam, c] = minimize_gamma(b, 1.3, 0.7);
  CHECK(dt.c_star_discrete == doctest::Approx(c).epsilon(1e-8));
  CHECK(dt.Xi == doctest::Approx(std::exp(0.7 - 1.3)).epsilon(1e-15));
}

TEST_CASE("branching parameters substitute for f'(0)") {
  const KernelMeasure b({{-1.0, 0.5}, {1.0, 0.5}}, {});
  // r (EZ - 1) = 0.7 reproduces the plain report
  const auto via_rate = discrete_translation(b, 1.3, 0.0, 0.35, 3.0);
  const auto direct = discrete_translation(b, 1.3, 0.7);
  CHECK(via_rate.c_star_discrete ==
        doctest::Approx(direct.c_star_discrete).epsilon(1e-10));
}

TEST_CASE("report pipeline fills the tilt quantities") {
  const KernelMeasure b({{-1.0, 0.5}, {1.0, 0.5}}, {});
  const auto rep = dispersion_report(b, 1.0, 1.0);
  REQUIRE(rep.lambda_star.has_value());
  REQUIRE(rep.nu.has_value());
  CHECK(*rep.nu == doctest::Approx(std::cosh(*rep.lambda_star)).epsilon(1e-10));
  CHECK(*rep.m == doctest::Approx(*rep.c_star / *rep.nu).epsilon(1e-10));
  CHECK(*rep.varK ==
        doctest::Approx(1.0 - std::tanh(*rep.lambda_star) * std::tanh(*rep.lambda_star))
            .epsilon(1e-8));
}
