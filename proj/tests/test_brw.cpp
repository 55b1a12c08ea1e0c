#include <cmath>

#include "doctest.h"
#include "frontlab/brw.hpp"
#include "frontlab/evolve.hpp"
#include "frontlab/kernel.hpp"
#include "frontlab/reaction.hpp"

using namespace frontlab;

namespace {

BrwConfig binary_config(double horizon, long trials, std::uint64_t seed) {
  BrwConfig cfg{1.0, KernelMeasure::uniform(-1.0, 1.0), 1.0,
                OffspringLaw{{{2, 1.0}}}, horizon, trials, seed, 0, {}};
  cfg.population_cap =
      static_cast<long>(20.0 * std::exp(horizon)) + 100;
  return cfg;
}

}  // namespace

TEST_CASE("population growth matches the exponential moment") {
  auto cfg = binary_config(1.0, 40000, 11);
  const auto st = simulate(cfg);
  CHECK(st.aborted_trials == 0);
  CHECK(std::abs(st.mean_population - std::exp(1.0)) <=
        3.0 * st.population_stderr);
}

TEST_CASE("checkpoint martingale Z_t e^{-r(EZ-1)t}") {
  auto cfg = binary_config(1.5, 40000, 23);
  cfg.checkpoints = {0.5, 1.0};
  const auto st = simulate(cfg);
  REQUIRE(st.checkpoint_population.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    const double t = cfg.checkpoints[c];
    const auto [mean, se] = st.checkpoint_population[c];
    CHECK(std::abs(mean * std::exp(-t) - 1.0) <= 3.0 * se * std::exp(-t) + 1e-12);
  }
}

TEST_CASE("short horizon: a single particle near the origin") {
  auto cfg = binary_config(1e-9, 200, 3);
  const auto st = simulate(cfg, {0.0});
  CHECK(st.mean_population == doctest::Approx(1.0));
  REQUIRE(st.max_cdf_points.size() == 1);
  // max is exactly 0 with overwhelming probability
  CHECK(st.max_cdf_points[0].p_max_le_x == doctest::Approx(1.0));
  CHECK(st.max_cdf_points[0].p_max_lt_x == doctest::Approx(0.0));
}

TEST_CASE("seed determinism and stream independence") {
  auto cfg = binary_config(1.0, 500, 99);
  const auto a = simulate(cfg);
  const auto b = simulate(cfg);
  REQUIRE(a.max_positions.size() == b.max_positions.size());
  for (std::size_t i = 0; i < a.max_positions.size(); ++i)
    CHECK(a.max_positions[i] == b.max_positions[i]);
  cfg.seed = 100;
  const auto c = simulate(cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.max_positions.size(); ++i)
    any_diff = any_diff || a.max_positions[i] != c.max_positions[i];
  CHECK(any_diff);
}

TEST_CASE("config validation") {
  auto cfg = binary_config(1.0, 1000, 1);
  cfg.population_cap = 5;  // below 10 E Z_1
  CHECK_THROWS(cfg.validate());
  cfg = binary_config(1.0, 0, 1);
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("poissonization: single-particle law at t = 1") {
  SUBCASE("atomic kernel") {
    const auto rep =
        poissonization_check(1.0, KernelMeasure::delta(-1.0), 20000, 5);
    CHECK(rep.ks_distance < rep.ks_critical);
  }
  SUBCASE("uniform kernel") {
    const auto rep =
        poissonization_check(1.0, KernelMeasure::uniform(-1.0, 1.0), 20000, 6);
    CHECK(rep.ks_distance < rep.ks_critical);
  }
}

TEST_CASE("duality check rejects mismatched configurations") {
  auto cfg = binary_config(1.0, 100, 1);
  Field u = make_step_field(0.1, -4.0, 4.0);
  u.t = 1.0;
  CHECK_NOTHROW(duality_check(cfg, Reaction::logistic(1.0), u, {0.0}));
  CHECK_THROWS(duality_check(cfg, Reaction::logistic(2.0), u, {0.0}));  // rate
  CHECK_THROWS(duality_check(cfg, Reaction::minus_power(1.0, 3.0), u, {0.0}));
  u.t = 2.0;  // time mismatch
  CHECK_THROWS(duality_check(cfg, Reaction::logistic(1.0), u, {0.0}));
}
