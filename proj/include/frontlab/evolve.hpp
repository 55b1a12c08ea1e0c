#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/kernel.hpp"
#include "frontlab/reaction.hpp"

namespace frontlab {

/// Solution values on a moving window. Monotone non-increasing in x;
/// left_bc/right_bc stand in for the equilibria outside the window.
struct Field {
  double dx = 0.0;
  double x_left = 0.0;
  std::vector<double> values;
  double t = 0.0;
  double left_bc = 1.0;
  double right_bc = 0.0;

  double x_right() const { return x_left + dx * (values.size() - 1); }
  double at_index(long i) const {
    if (i < 0) return left_bc;
    if (i >= static_cast<long>(values.size())) return right_bc;
    return values[static_cast<std::size_t>(i)];
  }
  /// linear interpolation, bc values outside the window
  double at(double x) const;
};

/// Step initial data: 1 for x <= 0, 0 for x > 0, with x = 0 on the grid.
Field make_step_field(double dx, double x_left, double x_right);

/// Convolution J*u precomputed as an integer-offset stencil on the grid.
/// Atoms must sit on the grid; density bins use midpoint quadrature at
/// resolution dx (midpoints are interpolated linearly).
class ConvPlan {
 public:
  ConvPlan(const KernelMeasure& J, double dx);

  void apply_serial(const Field& u, const std::vector<double>& vals,
                    std::vector<double>& out) const;
  void apply_parallel(const Field& u, const std::vector<double>& vals,
                      std::vector<double>& out) const;

  const std::vector<std::pair<int, double>>& stencil() const { return stencil_; }

 private:
  std::vector<std::pair<int, double>> stencil_;  // conv[j] = sum w * u[j + d]
};

/// One classical RK4 step of the method-of-lines system
/// du/dt = mu (J*u - u) + f(u). Throws on overshoot >= 1e-9 or loss of
/// monotonicity beyond 1e-10.
void step(Field& u, const ConvPlan& plan, double mu, const Reaction& f,
          double dt, bool parallel = true);

/// sup{x | u >= theta} by rightmost crossing + linear interpolation.
/// Returns nullopt when u < theta across the whole window (empty level set).
std::optional<double> level_set(const Field& u, double theta);

struct FrontTrace {
  std::vector<double> thetas;
  struct Sample {
    double t;
    std::vector<double> sigma;  // one per theta; NaN flags an empty level set
  };
  std::vector<Sample> samples;
  std::map<std::string, double> metadata;

  void write_csv(const std::string& path) const;
  static FrontTrace read_csv(const std::string& path);
};

struct RunConfig {
  double dx = 0.01;
  double window_width = 60.0;
  std::optional<double> x_left;   // default: step centered in the window
  std::optional<double> dt;       // default: 0.4/(mu + f'(0))
  double horizon = 100.0;
  std::vector<double> thetas{0.5};
  double sample_ratio = 1.05;     // geometric time sampling
  double edge_tol = 1e-12;
  // moving window; disable for pinned fronts with a wide fixed window
  bool recenter = true;
  // observer invoked at every sample instant (e.g. comparison checks)
  std::function<void(const Field&)> observer;
};

/// Integrates the equation from step data, recentring the window on
/// sigma_{1/2} whenever the front nears an edge. Aborts on boundary
/// contamination.
FrontTrace run(const KernelMeasure& J, double mu, const Reaction& f,
               const RunConfig& cfg);

struct ShiftFit {
  double c_hat = 0.0;
  double slope_hat = 0.0;      // coefficient of log t; estimates -3/(2 lambda*)
  double intercept_hat = 0.0;
  double residual_sup = 0.0;
  double t_min = 0.0, t_max = 0.0;
  std::string to_json() const;
};

/// Least squares of sigma_theta(t) - c* t against {1, log t} over the window.
ShiftFit fit_bramson(const FrontTrace& trace, double theta, double c_star,
                     double t_min, double t_max);

}  // namespace frontlab
