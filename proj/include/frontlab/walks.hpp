#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frontlab/kernel.hpp"

namespace frontlab {

/// Centered walk X_s = compound Poisson(nu, Kbar) + c* s, plus the
/// log-drifting variant Y_s = X_s + x + D log((t+1)/(t-s+1)).
struct DriftWalkSpec {
  double nu = 1.0;       // jump rate
  KernelMeasure kbar;    // jump law (spatial reverse of the tilt K)
  double drift_c = 0.0;  // constant drift c*
  double D = 0.0;        // log-drift coefficient
  double t = 1.0;        // terminal time
  double L = 2.0;        // target interval (L, 2L)

  /// E X_s = 0 requires nu * mean(Kbar) = -c*; checked to 1e-8.
  void validate() const;
};

struct WalkEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long trials = 0;
};

enum class BarrierVariant { None, F1Plus, F1Minus, F2Plus, F2Minus };

/// Feynman-Kac estimate of the Dirichlet solution:
/// z(t, x) = P[Y_t in (L, 2L), Y_s > 0 for 0 <= s <= t].
/// Positivity is checked exactly between jumps via the closed-form extremum
/// of the deterministic part.
WalkEstimate sample_path_functional(const DriftWalkSpec& spec, double x,
                                    long trials, std::uint64_t seed);

/// P[T_x > s] with T_x = inf{s | X_s + x < 0} (spec.D is ignored).
WalkEstimate hitting_tail(const DriftWalkSpec& spec, double x, double s,
                          long trials, std::uint64_t seed);

/// P[S_x^{i+-} > s] with the drifted barrier X_s + x +- f_i(s); f_1 follows
/// the log-drift profile up to spec.t, f_2 uses |D| log(s+1).
WalkEstimate drift_hitting_tail(const DriftWalkSpec& spec, BarrierVariant v,
                                double x, double s, long trials,
                                std::uint64_t seed);

struct OrderingReport {
  long trials = 0;
  long violations = 0;  // pathwise S^{i-} <= T_x <= S^{i+} failures
  WalkEstimate t_tail, f1_minus, f1_plus, f2_minus, f2_plus;
};

/// Shared-random-number comparison of all five survival events over [0, s].
OrderingReport ordering_check(const DriftWalkSpec& spec, double x, double s,
                              long trials, std::uint64_t seed);

struct BallotBandReport {
  struct Point {
    double t, x;
    double z_hat, stderr_;
    double ratio;  // z_hat (t+1)^{3/2} / (x+1)
    bool inconclusive;
  };
  std::vector<Point> points;
  double ratio_min = 0.0, ratio_max = 0.0;  // over conclusive points
  std::string to_json() const;
};

/// Computes z_hat(t, x) (t+1)^{3/2}/(x+1) over the grid; points whose MC
/// stderr exceeds 20% of the estimate are flagged inconclusive.
BallotBandReport ballot_band_check(const DriftWalkSpec& spec,
                                   const std::vector<double>& t_list,
                                   const std::vector<double>& x_list,
                                   long trials, std::uint64_t seed);

}  // namespace frontlab
