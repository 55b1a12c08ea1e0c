#include "frontlab/dispersion.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace frontlab {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Regular:
      return "Regular";
    case Classification::Trapping:
      return "Trapping";
    case Classification::Critical:
      return "Critical";
  }
  return "?";
}

double gamma_dispersion(const KernelMeasure& J, double mu, double fprime0,
                        double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("Gamma: lambda must be > 0");
  return (mu * J.exp_moment(lambda) - mu + fprime0) / lambda;
}

double gamma_crit_residual(const KernelMeasure& J, double mu, double fprime0,
                           double lambda) {
  return mu * (lambda * J.exp_x_moment(lambda) - J.exp_moment(lambda)) -
         fprime0 + mu;
}

Classification classify(const KernelMeasure& J, double mu, double fprime0) {
  if (J.zero_atom_mass() != 0.0)
    throw std::invalid_argument("classify: kernel must be normalized (no zero atom)");
  if (J.mass_positive() > 0.0) return Classification::Regular;
  if (std::abs(fprime0 - mu) <= 1e-12) return Classification::Critical;
  if (fprime0 > mu) return Classification::Trapping;
  return Classification::Regular;
}

std::pair<double, double> minimize_gamma(const KernelMeasure& J, double mu,
                                         double fprime0) {
  if (classify(J, mu, fprime0) != Classification::Regular)
    throw std::invalid_argument("minimize_gamma: triple is not regular");
  auto h = [&](double lam) { return gamma_crit_residual(J, mu, fprime0, lam); };

  double lo = 1e-12, hi = 1.0;
  while (h(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 700.0)
      throw std::runtime_error(
          "minimize_gamma: bracket exceeds lambda = 700 (numerically degenerate)");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
  }
  const double lambda_star = 0.5 * (lo + hi);
  const double c_star = gamma_dispersion(J, mu, fprime0, lambda_star);
  return {lambda_star, c_star};
}

double DiscreteTranslation::R(double lambda) const {
  return fprime0 + mu * (J->exp_moment(lambda) - 1.0);
}

DiscreteTranslation discrete_translation(const KernelMeasure& J, double mu,
                                         double fprime0,
                                         std::optional<double> r,
                                         std::optional<double> EZ) {
  DiscreteTranslation dt;
  dt.mu = mu;
  dt.J = &J;
  dt.fprime0 = (r && EZ) ? (*r) * (*EZ - 1.0) : fprime0;
  dt.Xi = std::exp(dt.fprime0 - mu);
  if (classify(J, mu, dt.fprime0) == Classification::Regular) {
    dt.c_star_discrete = minimize_gamma(J, mu, dt.fprime0).second;
  } else {
    dt.c_star_discrete = 0.0;  // infimum over lambda of Gamma > 0 at infinity
  }
  return dt;
}

DispersionReport dispersion_report(const KernelMeasure& J, double mu,
                                   double fprime0) {
  DispersionReport rep;
  rep.classification = classify(J, mu, fprime0);
  rep.Xi = std::exp(fprime0 - mu);
  if (rep.classification == Classification::Regular) {
    auto [ls, cs] = minimize_gamma(J, mu, fprime0);
    rep.lambda_star = ls;
    rep.c_star = cs;
    rep.negative_speed = cs < 0.0;
    const auto tk = tilt(J, mu, ls, cs);
    rep.nu = tk.nu;
    rep.m = tk.m;
    rep.varK = tk.variance;
  }
  return rep;
}

std::string DispersionReport::to_json() const {
  nlohmann::json j;
  j["classification"] = to_string(classification);
  j["Xi"] = Xi;
  auto put = [&](const char* name, const std::optional<double>& v) {
    if (v)
      j[name] = *v;
    else
      j[name] = nullptr;
  };
  put("lambda_star", lambda_star);
  put("c_star", c_star);
  put("nu", nu);
  put("m", m);
  put("varK", varK);
  if (negative_speed) j["negative_speed"] = true;
  return j.dump(2);
}

}  // namespace frontlab
