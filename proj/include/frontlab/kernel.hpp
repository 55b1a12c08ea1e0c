#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frontlab/rng.hpp"

namespace frontlab {

struct Atom {
  double pos;
  double mass;
};

struct Bin {
  double left;
  double right;
  double height;
};

/// A compactly supported probability measure on [-1, 1], stored as point
/// masses plus a piecewise-constant density. Exponential moments are exact.
class KernelMeasure {
 public:
  KernelMeasure(std::vector<Atom> atoms, std::vector<Bin> bins,
                bool allow_zero_atom = false);

  static KernelMeasure delta(double pos);
  static KernelMeasure uniform(double left, double right);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bin>& bins() const { return bins_; }

  double total_mass() const;
  /// mass on (0, 1], i.e. J(R_+)
  double mass_positive() const;
  double zero_atom_mass() const;

  double mean() const;
  double second_moment() const;
  double variance() const;

  /// integral of e^{lambda x} dJ
  double exp_moment(double lambda) const;
  /// integral of x e^{lambda x} dJ
  double exp_x_moment(double lambda) const;

  KernelMeasure reversed() const;

  double support_min() const;
  double support_max() const;

  /// inverse-CDF draw
  double sample(Rng& rng) const;

  std::string to_json() const;
  static KernelMeasure from_json(const std::string& text,
                                 bool allow_zero_atom = false);
  static KernelMeasure load(const std::string& path,
                            bool allow_zero_atom = false);

 private:
  void build_cdf();

  std::vector<Atom> atoms_;
  std::vector<Bin> bins_;
  // cumulative masses over atoms then bins, for sampling
  std::vector<double> cum_;
};

/// Strips any atom at 0 and rescales mu accordingly (J2 normalization).
std::pair<double, KernelMeasure> normalize(double mu, const KernelMeasure& raw);

struct TiltedKernel {
  KernelMeasure base;  // the probability measure K
  double nu;           // mu * int e^{lambda* x} dJ
  double m;            // mean of K (= c*/nu)
  double variance;     // Var K
};

/// K := (mu/nu) e^{lambda* x} J. When c_star is supplied, asserts m = c*/nu.
TiltedKernel tilt(const KernelMeasure& J, double mu, double lambda_star,
                  std::optional<double> c_star = std::nullopt);

}  // namespace frontlab
