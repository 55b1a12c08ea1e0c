#include "frontlab/walks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "frontlab/rng.hpp"

namespace frontlab {

void DriftWalkSpec::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("walk: nu must be > 0");
  if (std::abs(nu * kbar.mean() + drift_c) > 1e-8)
    throw std::invalid_argument(
        "walk: E X_s != 0 (need nu * mean(Kbar) = -c*)");
}

namespace {

// Deterministic part psi(s) = c s + phi(s) of the barrier-shifted walk.
// interval_min gives min over [s1, s2] in closed form: endpoints plus the
// unique interior critical point when one exists.
struct DriftProfile {
  double c = 0.0;
  // phi(s) = coef * log((t+1)/(t-s+1)) for the FK/f1 shapes
  // phi(s) = coef * log(s+1) for the f2 shape
  enum class Shape { Linear, LogRemaining, LogElapsed } shape = Shape::Linear;
  double coef = 0.0;
  double t = 0.0;      // horizon entering f1 / FK profiles
  bool strict = false; // FK requires Y > 0; hitting times die on < 0 only

  double phi(double s) const {
    switch (shape) {
      case Shape::Linear:
        return 0.0;
      case Shape::LogRemaining: {
        const double rem = std::max(t - s, 0.0) + 1.0;
        return coef * std::log((t + 1.0) / rem);
      }
      case Shape::LogElapsed:
        return coef * std::log(s + 1.0);
    }
    return 0.0;
  }

  double psi(double s) const { return c * s + phi(s); }

  double interval_min(double s1, double s2) const {
    double m = std::min(psi(s1), psi(s2));
    double scrit = -1.0;
    switch (shape) {
      case Shape::Linear:
        return m;
      case Shape::LogRemaining:
        // psi' = c + coef/(t - s + 1) on s < t
        if (c != 0.0) scrit = t + 1.0 + coef / c;
        if (scrit > std::min(s2, t)) scrit = -1.0;
        break;
      case Shape::LogElapsed:
        // psi' = c + coef/(s + 1)
        if (c != 0.0) scrit = -coef / c - 1.0;
        break;
    }
    if (scrit > s1 && scrit < s2) m = std::min(m, psi(scrit));
    return m;
  }
};

DriftProfile fk_profile(const DriftWalkSpec& spec) {
  DriftProfile p;
  p.c = spec.drift_c;
  p.shape = DriftProfile::Shape::LogRemaining;
  p.coef = spec.D;
  p.t = spec.t;
  p.strict = true;
  return p;
}

DriftProfile barrier_profile(const DriftWalkSpec& spec, BarrierVariant v,
                             double horizon) {
  DriftProfile p;
  p.c = spec.drift_c;
  const double mag = std::abs(spec.D);
  switch (v) {
    case BarrierVariant::None:
      p.shape = DriftProfile::Shape::Linear;
      break;
    case BarrierVariant::F1Plus:
    case BarrierVariant::F1Minus:
      p.shape = DriftProfile::Shape::LogRemaining;
      p.coef = (v == BarrierVariant::F1Plus) ? mag : -mag;
      p.t = horizon;
      break;
    case BarrierVariant::F2Plus:
    case BarrierVariant::F2Minus:
      p.shape = DriftProfile::Shape::LogElapsed;
      p.coef = (v == BarrierVariant::F2Plus) ? mag : -mag;
      break;
  }
  return p;
}

struct PathOutcome {
  std::vector<char> survived;  // per profile
  double terminal_y = 0.0;     // Y at the horizon for the first profile
};

// One compound-Poisson path shared across all barrier profiles. A profile
// survives [0, horizon] iff base + psi(s) stays strictly positive between
// jumps and just after each jump.
PathOutcome simulate_path(Rng& rng, const DriftWalkSpec& spec, double x,
                          double horizon,
                          const std::vector<DriftProfile>& profiles) {
  PathOutcome out;
  out.survived.assign(profiles.size(), 1);
  double s = 0.0;
  double jumps = 0.0;  // accumulated jump displacement
  long alive = static_cast<long>(profiles.size());
  auto dead = [](const DriftProfile& p, double v) {
    return p.strict ? v <= 0.0 : v < 0.0;
  };
  while (true) {
    const double tau = rng.exponential(spec.nu);
    const double s2 = std::min(s + tau, horizon);
    for (std::size_t p = 0; p < profiles.size(); ++p) {
      if (!out.survived[p]) continue;
      if (dead(profiles[p], x + jumps + profiles[p].interval_min(s, s2))) {
        out.survived[p] = 0;
        --alive;
      }
    }
    if (alive == 0) return out;
    if (s + tau >= horizon) break;
    s = s2;
    jumps += spec.kbar.sample(rng);
    for (std::size_t p = 0; p < profiles.size(); ++p) {
      if (!out.survived[p]) continue;
      if (dead(profiles[p], x + jumps + profiles[p].psi(s))) {
        out.survived[p] = 0;
        --alive;
      }
    }
    if (alive == 0) return out;
  }
  out.terminal_y = x + jumps + profiles.front().psi(horizon);
  return out;
}

WalkEstimate binomial_estimate(long hits, long trials) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n) + 1.0 / n, trials};
}

}  // namespace

WalkEstimate sample_path_functional(const DriftWalkSpec& spec, double x,
                                    long trials, std::uint64_t seed) {
  spec.validate();
  if (x < 0.0) throw std::invalid_argument("sample_path_functional: x must be >= 0");
  if (spec.t == 0.0)
    return {(x > spec.L && x < 2.0 * spec.L) ? 1.0 : 0.0, 0.0, trials};
  if (x == 0.0) return {0.0, 0.0, trials};  // Dirichlet boundary
  const std::vector<DriftProfile> profiles{fk_profile(spec)};
  long hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (long i = 0; i < trials; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const auto o = simulate_path(rng, spec, x, spec.t, profiles);
    if (o.survived[0] && o.terminal_y > spec.L && o.terminal_y < 2.0 * spec.L)
      ++hits;
  }
  return binomial_estimate(hits, trials);
}

WalkEstimate hitting_tail(const DriftWalkSpec& spec, double x, double s,
                          long trials, std::uint64_t seed) {
  spec.validate();
  if (x < 0.0 || !(s > 0.0))
    throw std::invalid_argument("hitting_tail: need x >= 0 and s > 0");
  const std::vector<DriftProfile> profiles{
      barrier_profile(spec, BarrierVariant::None, s)};
  long hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (long i = 0; i < trials; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    if (simulate_path(rng, spec, x, s, profiles).survived[0]) ++hits;
  }
  return binomial_estimate(hits, trials);
}

WalkEstimate drift_hitting_tail(const DriftWalkSpec& spec, BarrierVariant v,
                                double x, double s, long trials,
                                std::uint64_t seed) {
  spec.validate();
  const std::vector<DriftProfile> profiles{barrier_profile(spec, v, s)};
  long hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (long i = 0; i < trials; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    if (simulate_path(rng, spec, x, s, profiles).survived[0]) ++hits;
  }
  return binomial_estimate(hits, trials);
}

OrderingReport ordering_check(const DriftWalkSpec& spec, double x, double s,
                              long trials, std::uint64_t seed) {
  spec.validate();
  const std::vector<DriftProfile> profiles{
      barrier_profile(spec, BarrierVariant::None, s),
      barrier_profile(spec, BarrierVariant::F1Minus, s),
      barrier_profile(spec, BarrierVariant::F1Plus, s),
      barrier_profile(spec, BarrierVariant::F2Minus, s),
      barrier_profile(spec, BarrierVariant::F2Plus, s)};
  long hits[5] = {0, 0, 0, 0, 0};
  long violations = 0;
#pragma omp parallel for reduction(+ : violations, hits[:5]) schedule(static)
  for (long i = 0; i < trials; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const auto o = simulate_path(rng, spec, x, s, profiles);
    // survival is monotone in the barrier: S^{i-} <= T_x <= S^{i+}
    if ((o.survived[1] && !o.survived[0]) || (o.survived[0] && !o.survived[2]) ||
        (o.survived[3] && !o.survived[0]) || (o.survived[0] && !o.survived[4]))
      ++violations;
    for (int p = 0; p < 5; ++p)
      if (o.survived[static_cast<std::size_t>(p)]) ++hits[p];
  }
  OrderingReport rep;
  rep.trials = trials;
  rep.violations = violations;
  rep.t_tail = binomial_estimate(hits[0], trials);
  rep.f1_minus = binomial_estimate(hits[1], trials);
  rep.f1_plus = binomial_estimate(hits[2], trials);
  rep.f2_minus = binomial_estimate(hits[3], trials);
  rep.f2_plus = binomial_estimate(hits[4], trials);
  return rep;
}

BallotBandReport ballot_band_check(const DriftWalkSpec& spec,
                                   const std::vector<double>& t_list,
                                   const std::vector<double>& x_list,
                                   long trials, std::uint64_t seed) {
  BallotBandReport rep;
  rep.ratio_min = std::numeric_limits<double>::infinity();
  rep.ratio_max = 0.0;
  std::uint64_t stream_base = 0;
  for (double t : t_list) {
    DriftWalkSpec s = spec;
    s.t = t;
    for (double x : x_list) {
      const auto est =
          sample_path_functional(s, x, trials, seed + (stream_base++) * 0x10001);
      BallotBandReport::Point pt;
      pt.t = t;
      pt.x = x;
      pt.z_hat = est.value;
      pt.stderr_ = est.stderr_;
      pt.ratio = est.value * std::pow(t + 1.0, 1.5) / (x + 1.0);
      pt.inconclusive = est.stderr_ > 0.2 * est.value;
      if (!pt.inconclusive) {
        rep.ratio_min = std::min(rep.ratio_min, pt.ratio);
        rep.ratio_max = std::max(rep.ratio_max, pt.ratio);
      }
      rep.points.push_back(pt);
    }
  }
  return rep;
}

std::string BallotBandReport::to_json() const {
  nlohmann::json j;
  j["ratio_min"] = ratio_min;
  j["ratio_max"] = ratio_max;
  auto arr = nlohmann::json::array();
  for (const auto& p : points)
    arr.push_back({{"t", p.t},
                   {"x", p.x},
                   {"z_hat", p.z_hat},
                   {"stderr", p.stderr_},
                   {"ratio", p.ratio},
                   {"inconclusive", p.inconclusive}});
  j["points"] = arr;
  return j.dump(2);
}

}  // namespace frontlab
