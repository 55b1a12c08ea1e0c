#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frontlab/evolve.hpp"
#include "frontlab/kernel.hpp"
#include "frontlab/reaction.hpp"

namespace frontlab {

struct BrwConfig {
  double mu = 1.0;          // jump rate
  KernelMeasure J;          // jump law
  double r = 1.0;           // branch rate
  OffspringLaw kappa;       // offspring law on {2,3,...}
  double horizon = 1.0;
  long trials = 10000;
  std::uint64_t seed = 0;
  long population_cap = 0;  // must be >= 10 * E Z_horizon
  std::vector<double> checkpoints;  // extra times at which Z_t is recorded

  void validate() const;
};

struct BrwStats {
  struct CdfPoint {
    double x;
    double p_max_le_x;  // estimate of P[max <= x]
    double p_max_lt_x;  // estimate of P[max < x]; differs on lattice atoms
    double stderr_;
  };
  std::vector<CdfPoint> max_cdf_points;
  double mean_population = 0.0;
  double population_stderr = 0.0;
  long aborted_trials = 0;  // capped trials, counted separately
  long completed_trials = 0;
  // per checkpoint: mean Z_t and stderr
  std::vector<std::pair<double, double>> checkpoint_population;
  std::vector<double> max_positions;  // per completed trial, at the horizon
};

/// Event-driven continuous-time branching random walk started from a single
/// particle at 0. Jumps at rate mu with law J, branches in place at rate r
/// with offspring law kappa. Trials own independent RNG streams.
BrwStats simulate(const BrwConfig& cfg, const std::vector<double>& x_grid = {});

struct DualityReport {
  struct Point {
    double x;
    double mc;     // MC estimate of P[max > x]
    double pde;    // u(t, x)
    double stderr_;
    double sigmas;  // |mc - pde| in stderr units
  };
  std::vector<Point> points;
  double worst_sigmas = 0.0;
  std::string to_json() const;
};

/// McKean duality: compares P[max > x] against a PDE field at the same time.
/// The reaction must equal r[1 - u - g(1-u)] for the configured (r, kappa).
DualityReport duality_check(const BrwConfig& cfg, const Reaction& f,
                            const Field& pde, const std::vector<double>& xs);

struct PoissonizationReport {
  double ks_distance = 0.0;
  double ks_critical = 0.0;  // 1.36 / sqrt(n)
  long samples = 0;
};

/// Empirical law of a single particle's displacement at t = 1 against the
/// truncated Poissonization series of convolution powers of J.
PoissonizationReport poissonization_check(double mu, const KernelMeasure& J,
                                          long trials, std::uint64_t seed);

}  // namespace frontlab
