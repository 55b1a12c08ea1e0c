#include "frontlab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace frontlab {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

double Field::at(double x) const {
  const double s = (x - x_left) / dx;
  const long i = static_cast<long>(std::floor(s));
  const double fr = s - static_cast<double>(i);
  return (1.0 - fr) * at_index(i) + fr * at_index(i + 1);
}

Field make_step_field(double dx, double x_left, double x_right) {
  if (std::abs(x_left / dx - std::round(x_left / dx)) > 1e-9)
    throw std::invalid_argument("make_step_field: x_left must be a grid multiple of dx");
  Field u;
  u.dx = dx;
  u.x_left = x_left;
  const long n = static_cast<long>(std::round((x_right - x_left) / dx)) + 1;
  u.values.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double x = x_left + i * dx;
    u.values[static_cast<std::size_t>(i)] = (x <= 1e-12) ? 1.0 : 0.0;
  }
  return u;
}

ConvPlan::ConvPlan(const KernelMeasure& J, double dx) {
  std::map<int, double> coef;
  for (const auto& a : J.atoms()) {
    const double s = a.pos / dx;
    const int k = static_cast<int>(std::lround(s));
    if (std::abs(a.pos - k * dx) > 1e-12 * std::max(1.0, std::abs(a.pos)))
      throw std::invalid_argument("ConvPlan: atom position is not a grid multiple of dx");
    coef[-k] += a.mass;
  }
  for (const auto& b : J.bins()) {
    if (b.height == 0.0) continue;
    const double width = b.right - b.left;
    const int n = std::max(1, static_cast<int>(std::lround(width / dx)));
    const double ws = width / n;
    const double wgt = b.height * ws;
    for (int q = 0; q < n; ++q) {
      const double y = b.left + (q + 0.5) * ws;  // u(x - y)
      const double s = y / dx;
      const int k = static_cast<int>(std::floor(s));
      const double fr = s - k;
      coef[-k] += wgt * (1.0 - fr);
      coef[-k - 1] += wgt * fr;
    }
  }
  stencil_.assign(coef.begin(), coef.end());
}

void ConvPlan::apply_serial(const Field& u, const std::vector<double>& vals,
                            std::vector<double>& out) const {
  const long n = static_cast<long>(vals.size());
  out.resize(vals.size());
  int dmin = 0, dmax = 0;
  if (!stencil_.empty()) {
    dmin = stencil_.front().first;
    dmax = stencil_.back().first;
  }
  const long jlo = std::min<long>(n, std::max<long>(0, -static_cast<long>(dmin)));
  const long jhi = std::max<long>(jlo, std::min<long>(n, n - dmax));
  auto val_at = [&](long i) {
    if (i < 0) return u.left_bc;
    if (i >= n) return u.right_bc;
    return vals[static_cast<std::size_t>(i)];
  };
  for (long j = 0; j < jlo; ++j) {
    double s = 0.0;
    for (const auto& [d, w] : stencil_) s += w * val_at(j + d);
    out[static_cast<std::size_t>(j)] = s;
  }
  for (long j = jlo; j < jhi; ++j) {
    double s = 0.0;
    for (const auto& [d, w] : stencil_) s += w * vals[static_cast<std::size_t>(j + d)];
    out[static_cast<std::size_t>(j)] = s;
  }
  for (long j = jhi; j < n; ++j) {
    double s = 0.0;
    for (const auto& [d, w] : stencil_) s += w * val_at(j + d);
    out[static_cast<std::size_t>(j)] = s;
  }
}

void ConvPlan::apply_parallel(const Field& u, const std::vector<double>& vals,
                              std::vector<double>& out) const {
  const long n = static_cast<long>(vals.size());
  out.resize(vals.size());
  int dmin = 0, dmax = 0;
  if (!stencil_.empty()) {
    dmin = stencil_.front().first;
    dmax = stencil_.back().first;
  }
  const long jlo = std::min<long>(n, std::max<long>(0, -static_cast<long>(dmin)));
  const long jhi = std::max<long>(jlo, std::min<long>(n, n - dmax));
  auto val_at = [&](long i) {
    if (i < 0) return u.left_bc;
    if (i >= n) return u.right_bc;
    return vals[static_cast<std::size_t>(i)];
  };
  for (long j = 0; j < jlo; ++j) {
    double s = 0.0;
    for (const auto& [d, w] : stencil_) s += w * val_at(j + d);
    out[static_cast<std::size_t>(j)] = s;
  }
  const std::pair<int, double>* st = stencil_.data();
  const long ns = static_cast<long>(stencil_.size());
  const double* v = vals.data();
  double* o = out.data();
#pragma omp parallel for schedule(static)
  for (long j = jlo; j < jhi; ++j) {
    double s = 0.0;
    for (long q = 0; q < ns; ++q) s += st[q].second * v[j + st[q].first];
    o[j] = s;
  }
  for (long j = jhi; j < n; ++j) {
    double s = 0.0;
    for (const auto& [d, w] : stencil_) s += w * val_at(j + d);
    out[static_cast<std::size_t>(j)] = s;
  }
}

namespace {

void rhs(const Field& u, const ConvPlan& plan, double mu, const Reaction& f,
         const std::vector<double>& vals, std::vector<double>& conv,
         std::vector<double>& out, bool parallel) {
  if (parallel)
    plan.apply_parallel(u, vals, conv);
  else
    plan.apply_serial(u, vals, conv);
  out.resize(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    out[i] = mu * (conv[i] - vals[i]) + f(clamp01(vals[i]));
}

}  // namespace

void step(Field& u, const ConvPlan& plan, double mu, const Reaction& f,
          double dt, bool parallel) {
  const std::size_t n = u.values.size();
  std::vector<double> conv(n), k1(n), k2(n), k3(n), k4(n), tmp(n);

  rhs(u, plan, mu, f, u.values, conv, k1, parallel);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u.values[i] + 0.5 * dt * k1[i];
  rhs(u, plan, mu, f, tmp, conv, k2, parallel);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u.values[i] + 0.5 * dt * k2[i];
  rhs(u, plan, mu, f, tmp, conv, k3, parallel);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u.values[i] + dt * k3[i];
  rhs(u, plan, mu, f, tmp, conv, k4, parallel);

  double overshoot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = u.values[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    overshoot = std::max(overshoot, std::max(-v, v - 1.0));
    u.values[i] = v;
  }
  if (overshoot >= 1e-9)
    throw std::runtime_error(
        "step: overshoot " + std::to_string(overshoot) +
        " (dt too large or atom misaligned with the grid)");
  for (auto& v : u.values) v = clamp01(v);
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (u.values[i + 1] > u.values[i] + 1e-10)
      throw std::runtime_error("step: monotonicity violated");
  u.t += dt;
}

std::optional<double> level_set(const Field& u, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("level_set: theta must lie in (0,1)");
  const long n = static_cast<long>(u.values.size());
  for (long i = n - 1; i >= 0; --i) {
    const double v = u.values[static_cast<std::size_t>(i)];
    if (v >= theta) {
      const double x = u.x_left + i * u.dx;
      if (v == theta || i == n - 1) return x;
      const double vr = u.values[static_cast<std::size_t>(i + 1)];
      return x + u.dx * (v - theta) / (v - vr);
    }
  }
  return std::nullopt;
}

FrontTrace run(const KernelMeasure& J, double mu, const Reaction& f,
               const RunConfig& cfg) {
  const double fp0 = f.fprime0();
  const double dt_budget = 0.5 / (mu + fp0);
  const double dt = cfg.dt ? *cfg.dt : 0.4 / (mu + fp0);
  if (dt > dt_budget)
    throw std::invalid_argument("run: dt exceeds stability budget " +
                                std::to_string(dt_budget));

  const double dx = cfg.dx;
  const long ncells = static_cast<long>(std::round(cfg.window_width / dx));
  double x_left = cfg.x_left ? dx * std::round(*cfg.x_left / dx)
                             : -dx * std::round(0.5 * cfg.window_width / dx);
  Field u = make_step_field(dx, x_left, x_left + ncells * dx);
  const long n = static_cast<long>(u.values.size());
  ConvPlan plan(J, dx);

  FrontTrace trace;
  trace.thetas = cfg.thetas;
  trace.metadata["mu"] = mu;
  trace.metadata["fprime0"] = fp0;
  trace.metadata["dx"] = dx;
  trace.metadata["dt"] = dt;

  const long guard_lo = static_cast<long>(0.2 * n);
  const long guard_hi = static_cast<long>(0.8 * n);

  auto record = [&]() {
    FrontTrace::Sample s;
    s.t = u.t;
    for (double th : cfg.thetas) {
      auto sig = level_set(u, th);
      s.sigma.push_back(sig ? *sig : std::nan(""));
    }
    trace.samples.push_back(std::move(s));
    if (cfg.observer) cfg.observer(u);
  };

  auto check_edges = [&]() {
    if (1.0 - u.values.front() >= cfg.edge_tol)
      throw std::runtime_error("run: left-edge contamination at t=" +
                               std::to_string(u.t) + " (widen the window)");
    if (u.values.back() >= cfg.edge_tol)
      throw std::runtime_error("run: right-edge contamination at t=" +
                               std::to_string(u.t) + " (widen the window)");
  };

  auto recenter_if_needed = [&]() {
    // hard stop: the front escaped the central 60% despite the
    // one-cell-at-a-time recentring below
    if (u.values[static_cast<std::size_t>(guard_hi)] > 0.5 ||
        u.values[static_cast<std::size_t>(guard_lo)] < 0.5)
      throw std::runtime_error("run: front left the guard band at t=" +
                               std::to_string(u.t));
    auto sig = level_set(u, 0.5);
    if (!sig) return;
    const double center = u.x_left + 0.5 * (n - 1) * dx;
    const long shift = static_cast<long>(std::round((*sig - center) / dx));
    if (shift == 0) return;
    if (shift > 0) {
      if (shift >= n) throw std::runtime_error("run: window lost the front");
      std::move(u.values.begin() + shift, u.values.end(), u.values.begin());
      std::fill(u.values.end() - shift, u.values.end(), u.right_bc);
    } else {
      const long s = -shift;
      if (s >= n) throw std::runtime_error("run: window lost the front");
      std::move_backward(u.values.begin(), u.values.end() - s, u.values.end());
      std::fill(u.values.begin(), u.values.begin() + s, u.left_bc);
    }
    u.x_left += shift * dx;
  };

  check_edges();
  record();
  double next_sample = std::max(dt, 1e-2);
  while (u.t < cfg.horizon - 0.5 * dt) {
    step(u, plan, mu, f, dt);
    if (cfg.recenter) recenter_if_needed();
    check_edges();
    if (u.t >= next_sample || u.t >= cfg.horizon - 0.5 * dt) {
      record();
      while (next_sample <= u.t) next_sample *= cfg.sample_ratio;
    }
  }
  return trace;
}

ShiftFit fit_bramson(const FrontTrace& trace, double theta, double c_star,
                     double t_min, double t_max) {
  if (t_min < 10.0) throw std::invalid_argument("fit_bramson: t_min must be >= 10");
  if (t_max < 10.0 * t_min)
    throw std::invalid_argument("fit_bramson: window must span at least one decade");
  std::size_t ti = trace.thetas.size();
  for (std::size_t i = 0; i < trace.thetas.size(); ++i)
    if (std::abs(trace.thetas[i] - theta) < 1e-12) ti = i;
  if (ti == trace.thetas.size())
    throw std::invalid_argument("fit_bramson: theta not present in trace");

  std::vector<double> ts, ys;
  for (const auto& s : trace.samples) {
    if (s.t < t_min || s.t > t_max) continue;
    const double sig = s.sigma[ti];
    if (std::isnan(sig)) continue;
    ts.push_back(s.t);
    ys.push_back(sig - c_star * s.t);
  }
  if (ts.size() < 30)
    throw std::invalid_argument("fit_bramson: fewer than 30 samples in window");

  // normal equations for y = b + s log t
  double S = static_cast<double>(ts.size());
  double Sx = 0, Sxx = 0, Sy = 0, Sxy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double x = std::log(ts[i]);
    Sx += x;
    Sxx += x * x;
    Sy += ys[i];
    Sxy += x * ys[i];
  }
  const double det = S * Sxx - Sx * Sx;
  const double slope = (S * Sxy - Sx * Sy) / det;
  const double intercept = (Sxx * Sy - Sx * Sxy) / det;

  ShiftFit fit;
  fit.c_hat = c_star;
  fit.slope_hat = slope;
  fit.intercept_hat = intercept;
  fit.t_min = t_min;
  fit.t_max = t_max;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - intercept - slope * std::log(ts[i]);
    fit.residual_sup = std::max(fit.residual_sup, std::abs(r));
  }
  return fit;
}

std::string ShiftFit::to_json() const {
  nlohmann::json j;
  j["c_hat"] = c_hat;
  j["slope_hat"] = slope_hat;
  j["intercept_hat"] = intercept_hat;
  j["residual_sup"] = residual_sup;
  j["window"] = {t_min, t_max};
  return j.dump(2);
}

void FrontTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  for (const auto& [k, v] : metadata) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << "# " << k << "=" << buf << "\n";
  }
  out << "t,theta,sigma\n";
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", s.t);
      out << buf << ",";
      std::snprintf(buf, sizeof buf, "%.17g", thetas[i]);
      out << buf << ",";
      std::snprintf(buf, sizeof buf, "%.17g", s.sigma[i]);
      out << buf << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

FrontTrace FrontTrace::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace: " + path);
  FrontTrace trace;
  std::string line;
  std::map<double, std::map<std::size_t, double>> rows;  // t -> theta idx -> sigma
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(2, eq - 2);
        trace.metadata[key] = std::stod(line.substr(eq + 1));
      }
      continue;
    }
    if (line.rfind("t,", 0) == 0) continue;
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    const double t = std::stod(tok);
    std::getline(ss, tok, ',');
    const double theta = std::stod(tok);
    std::getline(ss, tok, ',');
    const double sigma = std::stod(tok);
    std::size_t ti = trace.thetas.size();
    for (std::size_t i = 0; i < trace.thetas.size(); ++i)
      if (trace.thetas[i] == theta) ti = i;
    if (ti == trace.thetas.size()) trace.thetas.push_back(theta);
    rows[t][ti] = sigma;
  }
  for (const auto& [t, m] : rows) {
    FrontTrace::Sample s;
    s.t = t;
    s.sigma.assign(trace.thetas.size(), std::nan(""));
    for (const auto& [ti, sig] : m) s.sigma[ti] = sig;
    trace.samples.push_back(std::move(s));
  }
  return trace;
}

}  // namespace frontlab
