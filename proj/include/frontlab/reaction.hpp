#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace frontlab {

/// Offspring distribution kappa on {2, 3, ...} with its generating function.
struct OffspringLaw {
  std::vector<std::pair<int, double>> probabilities;  // (k, p_k), k >= 2

  void validate() const;
  double mean() const;                      // E Z
  double moment(double order) const;        // E Z^order
  double pgf(double s) const;               // g(s) = E s^Z
};

struct ValidationReport {
  bool f1_pass = false;  // C^{1,gamma} near 0 with |F| <= C_F u^{1+gamma}
  bool f2_pass = false;  // f(0) = f(1) = 0, f > 0 on (0,1)
  bool f3_pass = false;  // f(u) <= f'(0) u
  double worst_f2_u = 0.0, worst_f2_val = 0.0;
  double worst_f3_u = 0.0, worst_f3_excess = 0.0;
  double fprime0 = 0.0;
  double holder_gamma = 0.0;
  double holder_CF = 0.0;
  bool all_pass() const { return f1_pass && f2_pass && f3_pass; }
};

/// A KPP reaction term. Closed-form families plus custom polynomials.
class Reaction {
 public:
  enum class Family { MinusPower, Logistic, Offspring, Polynomial };

  static Reaction minus_power(double a, double p);        // a (u - u^p)
  static Reaction logistic(double a);                     // a u (1 - u)
  static Reaction from_offspring(double r, OffspringLaw kappa);
  static Reaction polynomial(std::vector<double> coeffs); // ascending degree

  double operator()(double u) const;
  double fprime0() const { return fprime0_; }
  Family family() const { return family_; }

  bool is_polynomial() const;
  /// monomial coefficients, ascending degree (only when is_polynomial())
  std::vector<double> poly_coeffs() const;

  /// branch rate and offspring law when the reaction came from one
  const std::optional<std::pair<double, OffspringLaw>>& offspring_source() const {
    return offspring_;
  }

  ValidationReport validate() const;

  std::string to_json() const;
  static Reaction from_json(const std::string& text);
  static Reaction load(const std::string& path);

 private:
  Reaction() = default;

  Family family_ = Family::Polynomial;
  double a_ = 0.0, p_ = 0.0, r_ = 0.0;
  std::vector<double> coeffs_;
  std::optional<std::pair<double, OffspringLaw>> offspring_;
  double fprime0_ = 0.0;
};

struct Decomposition {
  double r;                        // -f'(1^-)
  std::vector<double> g_coeffs;    // power series of g at 0, ascending
  OffspringLaw kappa;
};

/// Recovers (r, kappa) with f(u) = r [1 - u - g(1-u)] when f is probabilistic.
/// Returns nullopt (with reason) otherwise. Only polynomial reactions are
/// accepted; analyticity cannot be checked numerically.
std::optional<Decomposition> probabilistic_decompose(const Reaction& f,
                                                     std::string* reason = nullptr);

}  // namespace frontlab
