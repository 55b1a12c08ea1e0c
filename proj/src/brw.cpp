#include "frontlab/brw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "frontlab/rng.hpp"

namespace frontlab {

void BrwConfig::validate() const {
  kappa.validate();
  if (!(mu > 0.0) || !(r > 0.0))
    throw std::invalid_argument("brw: rates mu, r must be > 0");
  if (trials <= 0) throw std::invalid_argument("brw: trials must be > 0");
  const double expected = std::exp(r * (kappa.mean() - 1.0) * horizon);
  if (population_cap < 10.0 * expected)
    throw std::invalid_argument(
        "brw: population_cap must be >= 10 * E Z_horizon = " +
        std::to_string(10.0 * expected) +
        " (lower the horizon or raise the cap)");
}

namespace {

struct Trial {
  double max_pos = 0.0;
  long population = 0;
  bool capped = false;
  std::vector<long> checkpoint_pop;
};

Trial run_trial(const BrwConfig& cfg, Rng& rng) {
  Trial out;
  out.checkpoint_pop.assign(cfg.checkpoints.size(), 0);
  std::vector<double> particles{0.0};
  // offspring counts drawn by inverse CDF over the finite support
  const auto& kp = cfg.kappa.probabilities;
  double t = 0.0;
  std::size_t next_cp = 0;

  auto note_checkpoints = [&](double up_to) {
    while (next_cp < cfg.checkpoints.size() && cfg.checkpoints[next_cp] <= up_to) {
      out.checkpoint_pop[next_cp] = static_cast<long>(particles.size());
      ++next_cp;
    }
  };

  while (true) {
    const double total_rate = (cfg.mu + cfg.r) * static_cast<double>(particles.size());
    const double dt = rng.exponential(total_rate);
    if (t + dt >= cfg.horizon) {
      note_checkpoints(cfg.horizon);
      break;
    }
    t += dt;
    note_checkpoints(t);
    const std::size_t idx =
        std::min(particles.size() - 1,
                 static_cast<std::size_t>(rng.uniform() * particles.size()));
    if (rng.uniform() < cfg.mu / (cfg.mu + cfg.r)) {
      particles[idx] += cfg.J.sample(rng);
    } else {
      double u = rng.uniform();
      int z = kp.back().first;
      for (const auto& [k, pk] : kp) {
        if (u < pk) {
          z = k;
          break;
        }
        u -= pk;
      }
      for (int c = 1; c < z; ++c) particles.push_back(particles[idx]);
      if (static_cast<long>(particles.size()) > cfg.population_cap) {
        out.capped = true;
        return out;
      }
    }
  }
  out.population = static_cast<long>(particles.size());
  out.max_pos = *std::max_element(particles.begin(), particles.end());
  return out;
}

}  // namespace

BrwStats simulate(const BrwConfig& cfg, const std::vector<double>& x_grid) {
  cfg.validate();
  BrwStats stats;
  std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));

#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < cfg.trials; ++i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    trials[static_cast<std::size_t>(i)] = run_trial(cfg, rng);
  }

  double pop_sum = 0.0, pop_sq = 0.0;
  std::vector<double> cp_sum(cfg.checkpoints.size(), 0.0),
      cp_sq(cfg.checkpoints.size(), 0.0);
  for (const auto& tr : trials) {
    if (tr.capped) {
      ++stats.aborted_trials;
      continue;
    }
    ++stats.completed_trials;
    stats.max_positions.push_back(tr.max_pos);
    pop_sum += tr.population;
    pop_sq += static_cast<double>(tr.population) * tr.population;
    for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) {
      cp_sum[c] += tr.checkpoint_pop[c];
      cp_sq[c] += static_cast<double>(tr.checkpoint_pop[c]) * tr.checkpoint_pop[c];
    }
  }
  const double n = static_cast<double>(std::max<long>(1, stats.completed_trials));
  stats.mean_population = pop_sum / n;
  stats.population_stderr =
      std::sqrt(std::max(0.0, pop_sq / n - stats.mean_population * stats.mean_population) / n);
  for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) {
    const double mean = cp_sum[c] / n;
    const double var = std::max(0.0, cp_sq[c] / n - mean * mean);
    stats.checkpoint_population.push_back({mean, std::sqrt(var / n)});
  }

  std::vector<double> sorted = stats.max_positions;
  std::sort(sorted.begin(), sorted.end());
  for (double x : x_grid) {
    const auto le = std::upper_bound(sorted.begin(), sorted.end(), x);
    const auto lt = std::lower_bound(sorted.begin(), sorted.end(), x);
    const double p = static_cast<double>(le - sorted.begin()) / n;
    const double q = static_cast<double>(lt - sorted.begin()) / n;
    stats.max_cdf_points.push_back(
        {x, p, q, std::sqrt(p * (1.0 - p) / n) + 1.0 / n});
  }
  return stats;
}

DualityReport duality_check(const BrwConfig& cfg, const Reaction& f,
                            const Field& pde, const std::vector<double>& xs) {
  // the PDE run and the BRW must describe the same equation
  const auto dec = probabilistic_decompose(f);
  if (!dec) throw std::invalid_argument("duality_check: reaction is not probabilistic");
  if (std::abs(dec->r - cfg.r) > 1e-9)
    throw std::invalid_argument("duality_check: branch rate mismatch with reaction");
  auto probs = dec->kappa.probabilities;
  auto cfg_probs = cfg.kappa.probabilities;
  std::sort(probs.begin(), probs.end());
  std::sort(cfg_probs.begin(), cfg_probs.end());
  if (probs.size() != cfg_probs.size())
    throw std::invalid_argument("duality_check: offspring law mismatch with reaction");
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (probs[i].first != cfg_probs[i].first ||
        std::abs(probs[i].second - cfg_probs[i].second) > 1e-9)
      throw std::invalid_argument("duality_check: offspring law mismatch with reaction");
  if (std::abs(pde.t - cfg.horizon) > 1e-9)
    throw std::invalid_argument("duality_check: PDE time differs from BRW horizon");

  const auto stats = simulate(cfg, xs);
  DualityReport rep;
  for (const auto& pt : stats.max_cdf_points) {
    DualityReport::Point p;
    p.x = pt.x;
    // step data 1_{x <= 0} dualizes to P[max >= x]; the >= matters because
    // the never-jumped lineage leaves an atom of the max law at 0
    p.mc = 1.0 - pt.p_max_lt_x;
    p.pde = pde.at(pt.x);
    p.stderr_ = pt.stderr_;
    p.sigmas = std::abs(p.mc - p.pde) / pt.stderr_;
    rep.worst_sigmas = std::max(rep.worst_sigmas, p.sigmas);
    rep.points.push_back(p);
  }
  return rep;
}

std::string DualityReport::to_json() const {
  nlohmann::json j;
  j["worst_sigmas"] = worst_sigmas;
  auto arr = nlohmann::json::array();
  for (const auto& p : points)
    arr.push_back({{"x", p.x},
                   {"mc", p.mc},
                   {"pde", p.pde},
                   {"stderr", p.stderr_},
                   {"sigmas", p.sigmas}});
  j["points"] = arr;
  return j.dump(2);
}

PoissonizationReport poissonization_check(double mu, const KernelMeasure& J,
                                          long trials, std::uint64_t seed) {
  // Discretize J onto a lattice. Atom-only kernels use their exact lattice
  // when all positions share a common grid spacing.
  const double h = 1e-3;
  const long width = static_cast<long>(std::lround(2.0 / h));  // support [-1,1]
  std::vector<double> pmf(static_cast<std::size_t>(width) + 1, 0.0);
  auto idx_of = [&](double x) {
    return std::min<long>(width, std::max<long>(0, std::lround((x + 1.0) / h)));
  };
  for (const auto& a : J.atoms()) pmf[static_cast<std::size_t>(idx_of(a.pos))] += a.mass;
  for (const auto& b : J.bins()) {
    const long i0 = idx_of(b.left), i1 = idx_of(b.right);
    for (long i = i0; i < i1; ++i) {
      const double l = -1.0 + i * h, r = l + h;
      pmf[static_cast<std::size_t>(i)] +=
          b.height * (std::min(r, b.right) - std::max(l, b.left));
    }
  }

  // truncated series sum_k e^{-mu} mu^k/k! J^{*k}; lattice origin shifts by k
  std::vector<double> series_pmf{1.0};  // k = 0 term starts as delta at 0
  long series_origin = 0;               // lattice index of position 0
  std::vector<double> conv_pow{1.0};
  long pow_origin = 0;
  double weight = std::exp(-mu), tail = 1.0 - weight;
  auto accumulate = [&](double w) {
    const long new_min = std::min(series_origin, pow_origin);
    const long new_max =
        std::max(series_origin + static_cast<long>(series_pmf.size()),
                 pow_origin + static_cast<long>(conv_pow.size()));
    std::vector<double> merged(static_cast<std::size_t>(new_max - new_min), 0.0);
    for (std::size_t i = 0; i < series_pmf.size(); ++i)
      merged[static_cast<std::size_t>(series_origin - new_min) + i] += series_pmf[i];
    for (std::size_t i = 0; i < conv_pow.size(); ++i)
      merged[static_cast<std::size_t>(pow_origin - new_min) + i] += w * conv_pow[i];
    series_pmf = std::move(merged);
    series_origin = new_min;
  };
  // scale the k=0 delta by its Poisson weight
  series_pmf[0] = weight;
  long k = 0;
  while (tail > 1e-12) {
    ++k;
    weight *= mu / static_cast<double>(k);
    tail -= weight;
    // convolve previous power with the one-jump pmf
    std::vector<double> next(conv_pow.size() + pmf.size() - 1, 0.0);
    for (std::size_t i = 0; i < conv_pow.size(); ++i) {
      if (conv_pow[i] == 0.0) continue;
      for (std::size_t q = 0; q < pmf.size(); ++q)
        next[i + q] += conv_pow[i] * pmf[q];
    }
    conv_pow = std::move(next);
    pow_origin -= static_cast<long>(std::lround(1.0 / h));  // support shifts by -1
    accumulate(weight);
    if (k > 500) break;
  }
  std::vector<double> series_cdf(series_pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < series_pmf.size(); ++i) {
    acc += series_pmf[i];
    series_cdf[i] = acc;
  }

  // empirical single-particle displacement at t = 1
  std::vector<double> samples(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < trials; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const std::uint64_t njumps = rng.poisson(mu);
    double x = 0.0;
    for (std::uint64_t q = 0; q < njumps; ++q) x += J.sample(rng);
    samples[static_cast<std::size_t>(i)] = x;
  }
  std::sort(samples.begin(), samples.end());

  auto series_cdf_at = [&](double x, bool left_limit) {
    // CDF of the lattice measure.  Right-continuous version includes every
    // cell whose lattice point is <= x; the left limit excludes a cell that
    // sits exactly at x but keeps everything strictly below.  Nearest-cell
    // rounding would be wrong here: a continuous sample just next to an atom
    // (e.g. -1e-4 beside the no-jump atom at 0) must not gain or lose that
    // atom's mass.  The epsilon absorbs floating-point error for samples
    // that land exactly on a lattice point.
    const double pos = x / h - static_cast<double>(series_origin);
    const long i = left_limit
                       ? static_cast<long>(std::ceil(pos - 1e-6)) - 1
                       : static_cast<long>(std::floor(pos + 1e-6));
    if (i < 0) return 0.0;
    if (i >= static_cast<long>(series_cdf.size())) return 1.0;
    return series_cdf[static_cast<std::size_t>(i)];
  };

  PoissonizationReport rep;
  rep.samples = trials;
  rep.ks_critical = 1.36 / std::sqrt(static_cast<double>(trials));
  const double n = static_cast<double>(trials);
  // atoms of the lattice law produce tied samples: compare F against the
  // empirical CDF after the tied block and its left limit before the block
  for (std::size_t i = 0; i < samples.size();) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double f_right = series_cdf_at(samples[i], false);
    const double f_left = series_cdf_at(samples[i], true);
    rep.ks_distance = std::max(
        {rep.ks_distance, std::abs(f_right - static_cast<double>(j) / n),
         std::abs(f_left - static_cast<double>(i) / n)});
    i = j;
  }
  return rep;
}

}  // namespace frontlab
