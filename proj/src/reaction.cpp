#include "frontlab/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace frontlab {

namespace {

double poly_eval(const std::vector<double>& c, double u) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * u + *it;
  return v;
}

double poly_deriv_at(const std::vector<double>& c, double u) {
  double v = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) v = v * u + c[j] * static_cast<double>(j);
  return v;
}

// coefficients of q(s) := p(1 - s)
std::vector<double> poly_compose_one_minus(const std::vector<double>& p) {
  std::vector<double> out(p.size(), 0.0);
  // (1-s)^j expanded via Pascal row
  std::vector<double> binom{1.0};
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j > 0) {
      binom.push_back(0.0);
      for (std::size_t i = binom.size() - 1; i > 0; --i) binom[i] += binom[i - 1];
    }
    double sign = 1.0;
    for (std::size_t i = 0; i <= j; ++i) {
      out[i] += p[j] * binom[i] * sign;
      sign = -sign;
    }
  }
  return out;
}

}  // namespace

void OffspringLaw::validate() const {
  if (probabilities.empty()) throw std::invalid_argument("offspring: empty law");
  double total = 0.0;
  for (const auto& [k, pk] : probabilities) {
    if (k < 2) throw std::invalid_argument("offspring: support must lie in {2,3,...}");
    if (!(pk > 0.0)) throw std::invalid_argument("offspring: probabilities must be > 0");
    total += pk;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("offspring: probabilities must sum to 1");
}

double OffspringLaw::mean() const { return moment(1.0); }

double OffspringLaw::moment(double order) const {
  double s = 0.0;
  for (const auto& [k, pk] : probabilities) s += pk * std::pow(k, order);
  return s;
}

double OffspringLaw::pgf(double s) const {
  double v = 0.0;
  for (const auto& [k, pk] : probabilities) v += pk * std::pow(s, k);
  return v;
}

Reaction Reaction::minus_power(double a, double p) {
  if (!(a > 0.0) || !(p > 1.0))
    throw std::invalid_argument("minus_power: need a > 0 and p > 1");
  Reaction f;
  f.family_ = Family::MinusPower;
  f.a_ = a;
  f.p_ = p;
  f.fprime0_ = a;
  return f;
}

Reaction Reaction::logistic(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("logistic: need a > 0");
  Reaction f;
  f.family_ = Family::Logistic;
  f.a_ = a;
  f.fprime0_ = a;
  return f;
}

Reaction Reaction::from_offspring(double r, OffspringLaw kappa) {
  if (!(r > 0.0)) throw std::invalid_argument("from_offspring: need r > 0");
  kappa.validate();
  Reaction f;
  f.family_ = Family::Offspring;
  f.r_ = r;
  f.fprime0_ = r * (kappa.mean() - 1.0);
  f.offspring_ = std::make_pair(r, std::move(kappa));
  return f;
}

Reaction Reaction::polynomial(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() < 2) throw std::invalid_argument("polynomial: degree >= 1 required");
  Reaction f;
  f.family_ = Family::Polynomial;
  f.fprime0_ = coeffs.size() > 1 ? coeffs[1] : 0.0;
  f.coeffs_ = std::move(coeffs);
  return f;
}

double Reaction::operator()(double u) const {
  switch (family_) {
    case Family::MinusPower:
      return a_ * (u - std::pow(u, p_));
    case Family::Logistic:
      return a_ * u * (1.0 - u);
    case Family::Offspring: {
      const auto& [r, kappa] = *offspring_;
      return r * (1.0 - u - kappa.pgf(1.0 - u));
    }
    case Family::Polynomial:
      return poly_eval(coeffs_, u);
  }
  return 0.0;
}

bool Reaction::is_polynomial() const {
  switch (family_) {
    case Family::MinusPower:
      return p_ == std::floor(p_);
    case Family::Logistic:
    case Family::Offspring:
    case Family::Polynomial:
      return true;
  }
  return false;
}

std::vector<double> Reaction::poly_coeffs() const {
  if (!is_polynomial()) throw std::logic_error("reaction is not polynomial");
  switch (family_) {
    case Family::MinusPower: {
      std::vector<double> c(static_cast<std::size_t>(p_) + 1, 0.0);
      c[1] = a_;
      c[static_cast<std::size_t>(p_)] -= a_;
      return c;
    }
    case Family::Logistic:
      return {0.0, a_, -a_};
    case Family::Offspring: {
      const auto& [r, kappa] = *offspring_;
      int kmax = 0;
      for (const auto& [k, pk] : kappa.probabilities) kmax = std::max(kmax, k);
      // g(1-u) as a polynomial in u
      std::vector<double> g(static_cast<std::size_t>(kmax) + 1, 0.0);
      for (const auto& [k, pk] : kappa.probabilities) g[static_cast<std::size_t>(k)] = pk;
      auto g1mu = poly_compose_one_minus(g);
      std::vector<double> c(g1mu.size(), 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = -r * g1mu[i];
      c[0] += r;
      if (c.size() > 1) c[1] -= r;
      return c;
    }
    case Family::Polynomial:
      return coeffs_;
  }
  return {};
}

ValidationReport Reaction::validate() const {
  ValidationReport rep;
  rep.fprime0 = fprime0_;
  const auto& f = *this;

  // F2: endpoints exactly, positivity on an interior grid
  const int n = 10000;
  rep.f2_pass = std::abs(f(0.0)) <= 1e-12 && std::abs(f(1.0)) <= 1e-12;
  rep.f3_pass = true;
  for (int i = 1; i < n; ++i) {
    const double u = static_cast<double>(i) / n;
    const double v = f(u);
    if (v <= 0.0 && rep.f2_pass) {
      rep.f2_pass = false;
      rep.worst_f2_u = u;
      rep.worst_f2_val = v;
    }
    const double excess = v - fprime0_ * u;
    if (excess > 1e-12 && excess > rep.worst_f3_excess) {
      rep.f3_pass = false;
      rep.worst_f3_u = u;
      rep.worst_f3_excess = excess;
    }
  }

  // F1: largest gamma <= 0.99 for which |F(u)| <= C_F u^{1+gamma} looks
  // stable on a logarithmic grid near 0. C_F is diagnostic only.
  auto F = [&](double u) { return f(u) - fprime0_ * u; };
  for (double gamma = 0.99; gamma >= 0.01; gamma -= 0.01) {
    double sup_small = 0.0, sup_large = 0.0;
    for (double u = 1e-8; u <= 0.1; u *= 1.2589254117941673) {  // ~10^(0.1) steps
      const double ratio = std::abs(F(u)) / std::pow(u, 1.0 + gamma);
      if (u < 1e-4)
        sup_small = std::max(sup_small, ratio);
      else
        sup_large = std::max(sup_large, ratio);
    }
    if (sup_small <= sup_large * (1.0 + 1e-6) + 1e-12) {
      rep.f1_pass = true;
      rep.holder_gamma = gamma;
      rep.holder_CF = 1.1 * std::max(sup_small, sup_large);
      break;
    }
  }
  return rep;
}

std::optional<Decomposition> probabilistic_decompose(const Reaction& f,
                                                     std::string* reason) {
  auto fail = [&](const std::string& why) -> std::optional<Decomposition> {
    if (reason) *reason = why;
    return std::nullopt;
  };
  if (!f.is_polynomial())
    return fail("decomposition requires a polynomial reaction (analyticity unverifiable)");
  const auto c = f.poly_coeffs();
  const double fp1 = poly_deriv_at(c, 1.0);
  if (fp1 >= -1e-12) return fail("f'(1-) >= 0: not decomposable");
  const double r = -fp1;

  // g(s) = s - f(1 - s)/r
  auto f1ms = poly_compose_one_minus(c);
  std::vector<double> g(std::max<std::size_t>(f1ms.size(), 2), 0.0);
  for (std::size_t i = 0; i < f1ms.size(); ++i) g[i] = -f1ms[i] / r;
  g[1] += 1.0;

  if (std::abs(g[0]) > 1e-12) return fail("g(0) != 0 (f(1) != 0)");
  if (std::abs(g[1]) > 1e-12) return fail("g'(0) != 0");
  double total = 0.0;
  for (std::size_t k = 2; k < g.size(); ++k) {
    if (g[k] < -1e-12)
      return fail("negative series coefficient at degree " + std::to_string(k) +
                  ": not probabilistic");
    total += g[k];
  }
  if (std::abs(total - 1.0) > 1e-10) return fail("g(1) != 1 (f(0) != 0)");

  Decomposition dec;
  dec.r = r;
  dec.g_coeffs = g;
  for (std::size_t k = 2; k < g.size(); ++k)
    if (g[k] > 1e-12)
      dec.kappa.probabilities.push_back({static_cast<int>(k), g[k]});
  // absorb rounding so the law validates exactly
  double s = 0.0;
  for (auto& [k, pk] : dec.kappa.probabilities) s += pk;
  for (auto& [k, pk] : dec.kappa.probabilities) pk /= s;
  dec.kappa.validate();
  return dec;
}

std::string Reaction::to_json() const {
  nlohmann::json j;
  switch (family_) {
    case Family::MinusPower:
      j = {{"family", "minus_power"}, {"a", a_}, {"p", p_}};
      break;
    case Family::Logistic:
      j = {{"family", "logistic"}, {"a", a_}};
      break;
    case Family::Offspring: {
      j["family"] = "offspring";
      j["r"] = offspring_->first;
      auto arr = nlohmann::json::array();
      for (const auto& [k, pk] : offspring_->second.probabilities)
        arr.push_back({k, pk});
      j["kappa"] = arr;
      break;
    }
    case Family::Polynomial:
      j = {{"family", "polynomial"}, {"coeffs", coeffs_}};
      break;
  }
  return j.dump(2);
}

Reaction Reaction::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const std::string family = j.at("family").get<std::string>();
  if (family == "minus_power")
    return minus_power(j.at("a").get<double>(), j.at("p").get<double>());
  if (family == "logistic")
    return logistic(j.at("a").get<double>());
  if (family == "offspring") {
    OffspringLaw kappa;
    for (const auto& e : j.at("kappa"))
      kappa.probabilities.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
    return from_offspring(j.at("r").get<double>(), std::move(kappa));
  }
  if (family == "polynomial")
    return polynomial(j.at("coeffs").get<std::vector<double>>());
  throw std::invalid_argument("unknown reaction family: " + family);
}

Reaction Reaction::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reaction file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace frontlab
