#include "frontlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace frontlab {
namespace analytic {

double riccati_u(double p, double t) {
  if (!(p > 1.0)) throw std::invalid_argument("riccati_u: p must be > 1");
  if (t < 0.0) throw std::invalid_argument("riccati_u: t must be >= 0");
  return std::pow((p - 1.0) * t + 1.0, -1.0 / (p - 1.0));
}

double critical_front(double p, double x) { return std::exp(-std::pow(p, x)); }

double front_inverse(double p, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("front_inverse: theta must lie in (0,1)");
  return std::log(-std::log(theta)) / std::log(p);
}

double critical_front_floor(double p, double x) {
  return critical_front(p, std::floor(x));
}

double omega(double p) { return std::pow((p + 1.0) / p, 1.0 / (p - 1.0)); }

double sigma_plus(double p, double t) {
  return -std::log(std::log(t + 1.0)) / std::log(p) + 1.0;
}

// The -1 makes the drifting profile U(x - sigma_-) match the buffer value
// u(t,-1) at x = -1, which is what the comparison argument needs.
double sigma_minus(double p, double t) {
  double theta = riccati_u(p, t);
  theta = std::min(1.0 - 1e-12, std::max(1e-12, theta));
  return -front_inverse(p, theta) - 1.0;
}

double supersolution(double p, double t, double x) {
  return omega(p) * std::pow(t + 1.0, -std::pow(p, x - 1.0));
}

double FrontTable::at(double x) const {
  if (x >= 0.0) return 0.0;
  if (x <= x_left) return values.back();
  const double s = -x / dx;
  const std::size_t i = static_cast<std::size_t>(std::floor(s));
  const double fr = s - static_cast<double>(i);
  if (i + 1 >= values.size()) return values.back();
  return (1.0 - fr) * values[i] + fr * values[i + 1];
}

namespace {

bool is_unit_bin(const KernelMeasure& J) {
  if (!J.atoms().empty() || J.bins().size() != 1) return false;
  const auto& b = J.bins().front();
  return std::abs(b.left + 1.0) < 1e-12 && std::abs(b.right) < 1e-12 &&
         std::abs(b.height - 1.0) < 1e-12;
}

bool is_logistic_unit(const Reaction& f) {
  for (double u : {0.2, 0.5, 0.7})
    if (std::abs(f(u) - (u - u * u)) > 1e-12) return false;
  return true;
}

// worked case: U = -x/2 on [-1, 0], then 2 U U' = U(x+1) - U(x) per interval
FrontTable worked_front(int depth, double dx) {
  FrontTable tab;
  tab.dx = dx;
  tab.x_left = -static_cast<double>(depth);
  const long per_unit = static_cast<long>(std::lround(1.0 / dx));
  if (std::abs(per_unit * dx - 1.0) > 1e-12)
    throw std::invalid_argument("trapping_front: dx must divide 1");
  const long n = per_unit * depth;
  tab.values.resize(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= per_unit; ++i)
    tab.values[static_cast<std::size_t>(i)] = 0.5 * i * dx;  // U(-i dx) = i dx / 2

  auto table_at = [&](double x, long filled) {
    // x <= 0; index known up to `filled`
    if (x >= 0.0) return 0.0;
    const double s = -x / dx;
    long i = static_cast<long>(std::floor(s));
    const double fr = s - static_cast<double>(i);
    i = std::min(i, filled - 1);
    return (1.0 - fr) * tab.values[static_cast<std::size_t>(i)] +
           fr * tab.values[static_cast<std::size_t>(i + 1)];
  };

  for (long i = per_unit; i < n; ++i) {
    // integrate from x = -i dx to x = -(i+1) dx with RK4, step h = -dx
    const double x0 = -static_cast<double>(i) * dx;
    const double u0 = tab.values[static_cast<std::size_t>(i)];
    const double h = -dx;
    auto fode = [&](double x, double u) {
      return (table_at(x + 1.0, i + 1) - u) / (2.0 * u);
    };
    const double k1 = fode(x0, u0);
    const double k2 = fode(x0 + 0.5 * h, u0 + 0.5 * h * k1);
    const double k3 = fode(x0 + 0.5 * h, u0 + 0.5 * h * k2);
    const double k4 = fode(x0 + h, u0 + h * k3);
    tab.values[static_cast<std::size_t>(i + 1)] =
        u0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return tab;
}

FrontTable atomic_front(const KernelMeasure& J, double mu, const Reaction& f,
                        int depth, double dx) {
  FrontTable tab;
  tab.dx = dx;
  tab.x_left = -static_cast<double>(depth);
  const long n = static_cast<long>(std::lround(depth / dx));
  // atom offsets in cells
  std::vector<std::pair<long, double>> offsets;
  for (const auto& a : J.atoms()) {
    if (a.pos > -1e-15 || a.pos < -1.0 - 1e-15)
      throw std::invalid_argument("trapping_front: atomic J must be supported in [-1,0)");
    const long k = static_cast<long>(std::lround(-a.pos / dx));
    if (std::abs(-a.pos - k * dx) > 1e-12)
      throw std::invalid_argument("trapping_front: atom not aligned with dx");
    offsets.push_back({k, a.mass});
  }
  tab.values.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (long i = 1; i <= n; ++i) {
    double target = 0.0;  // mu (J*U)(x) with x = -i dx
    for (const auto& [k, w] : offsets) {
      const long j = i - k;  // index of x + |pos|
      target += w * ((j <= 0) ? 0.0 : tab.values[static_cast<std::size_t>(j)]);
    }
    target *= mu;
    const double prev = tab.values[static_cast<std::size_t>(i - 1)];
    auto g = [&](double v) { return mu * v - f(v) - target; };
    double lo = prev, hi = 1.0;
    if (g(hi) < 0.0) {
      tab.saturated = true;
      tab.values[static_cast<std::size_t>(i)] = 1.0;
      continue;
    }
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double v = 0.5 * (lo + hi);
    tab.values[static_cast<std::size_t>(i)] = v;
    if (1.0 - v < 1e-12) tab.saturated = true;
  }
  return tab;
}

}  // namespace

FrontTable trapping_front(const KernelMeasure& J, double mu, const Reaction& f,
                          int depth, double dx) {
  if (depth < 1 || !(dx > 0.0))
    throw std::invalid_argument("trapping_front: need depth >= 1 and dx > 0");
  if (is_unit_bin(J) && std::abs(mu - 1.0) < 1e-12 && is_logistic_unit(f))
    return worked_front(depth, dx);
  if (J.bins().empty() && !J.atoms().empty()) return atomic_front(J, mu, f, depth, dx);
  throw std::invalid_argument(
      "trapping_front: supported cases are (mu=1, Unif[-1,0], u-u^2) and purely atomic J");
}

std::optional<double> forbidden_band(const Reaction& f, double mu) {
  if (f.fprime0() <= mu) return std::nullopt;
  auto d = [&](double s) { return f(s) - mu * s; };
  const int n = 100000;
  double prev = 1.0 / n;
  for (int i = 2; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    if (d(s) <= 0.0) {
      double lo = prev, hi = s;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (d(mid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = s;
  }
  return 1.0;
}

}  // namespace analytic
}  // namespace frontlab
