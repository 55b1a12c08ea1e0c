#pragma once

#include <optional>
#include <string>

#include "frontlab/kernel.hpp"

namespace frontlab {

enum class Classification { Regular, Trapping, Critical };

std::string to_string(Classification c);

struct DispersionReport {
  Classification classification = Classification::Regular;
  std::optional<double> lambda_star;
  std::optional<double> c_star;
  std::optional<double> nu;
  std::optional<double> m;
  std::optional<double> varK;
  double Xi = 0.0;  // exp[f'(0) - mu]
  bool negative_speed = false;
  std::string to_json() const;
};

/// Gamma(lambda) = [mu (int e^{lambda x} dJ) - mu + f'(0)] / lambda
double gamma_dispersion(const KernelMeasure& J, double mu, double fprime0,
                        double lambda);

/// mu int e^{lambda x}(lambda x - 1) dJ - f'(0) + mu, strictly increasing in
/// lambda; Gamma'(lambda) = 0 iff this vanishes.
double gamma_crit_residual(const KernelMeasure& J, double mu, double fprime0,
                           double lambda);

Classification classify(const KernelMeasure& J, double mu, double fprime0);

/// (lambda*, c*) for a regular triple, by bisection on the monotone
/// critical-point residual. Throws if the bracket exceeds lambda = 700.
std::pair<double, double> minimize_gamma(const KernelMeasure& J, double mu,
                                         double fprime0);

struct DiscreteTranslation {
  double Xi;               // exp[f'(0) - mu]
  double c_star_discrete;  // inf R(lambda)/lambda
  double R(double lambda) const;
  double fprime0, mu;
  const KernelMeasure* J;
};

/// Discrete-time dictionary: R(lambda) = f'(0) + mu (E e^{lambda X} - 1).
/// When (r, EZ) are given, f'(0) is replaced by r (EZ - 1).
DiscreteTranslation discrete_translation(const KernelMeasure& J, double mu,
                                         double fprime0,
                                         std::optional<double> r = std::nullopt,
                                         std::optional<double> EZ = std::nullopt);

/// Full pipeline: classify, then (lambda*, c*, nu, m, Var K) when regular.
DispersionReport dispersion_report(const KernelMeasure& J, double mu,
                                   double fprime0);

}  // namespace frontlab
