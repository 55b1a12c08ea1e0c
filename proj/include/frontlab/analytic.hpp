#pragma once

#include <optional>
#include <vector>

#include "frontlab/kernel.hpp"
#include "frontlab/reaction.hpp"

namespace frontlab {
namespace analytic {

/// Closed-form solution of du/dt = -u^p from u = 1 (time already rescaled so
/// mu = 1); valid on the buffer zone x in [-1, 0).
double riccati_u(double p, double t);

/// Stationary critical front U(x) = exp(-p^x) and its inverse.
double critical_front(double p, double x);
double front_inverse(double p, double theta);
/// floor variant U(floor(x))
double critical_front_floor(double p, double x);

/// ((p+1)/p)^{1/(p-1)}
double omega(double p);

/// sigma_+(t) = -log log(t+1)/log p + 1
double sigma_plus(double p, double t);
/// sigma_-(t) = -U^{-1}(u(t,-1)) - 1, via the Riccati value
double sigma_minus(double p, double t);

/// Supersolution w(t,x) = Omega * U(x - sigma_+(t)) = Omega (t+1)^{-p^{x-1}}
double supersolution(double p, double t, double x);

struct FrontTable {
  double dx = 0.0;
  double x_left = 0.0;  // values tabulated on [x_left, 0]
  std::vector<double> values;
  bool saturated = false;  // recursion reached U = 1 before full depth

  double at(double x) const;  // linear interpolation; 0 for x >= 0
};

/// Stationary trapping/critical front vanishing on [0, inf), tabulated on
/// [-depth, 0]. Two supported cases:
///  - worked case mu = 1, J = Unif[-1,0], f = u - u^2 (interval ODE of the
///    stationary relation, integrated leftward per unit interval);
///  - purely atomic J supported in [-1, 0] (per-cell algebraic recursion
///    mu U - f(U) = mu (J*U)).
FrontTable trapping_front(const KernelMeasure& J, double mu, const Reaction& f,
                          int depth, double dx);

/// theta_0 = sup of the component of {f(s) > mu s} containing 0+; empty when
/// f'(0) <= mu.
std::optional<double> forbidden_band(const Reaction& f, double mu);

}  // namespace analytic
}  // namespace frontlab
