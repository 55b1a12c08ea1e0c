#include "frontlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace frontlab {

namespace {

constexpr double kMassTol = 1e-12;

// int_l^r e^{lambda x} dx, stable near lambda = 0
double bin_exp_integral(double l, double r, double lambda) {
  if (lambda == 0.0) return r - l;
  return std::exp(lambda * l) * std::expm1(lambda * (r - l)) / lambda;
}

// int_l^r x e^{lambda x} dx
double bin_exp_x_integral(double l, double r, double lambda) {
  const double scale = std::abs(lambda) * std::max({std::abs(l), std::abs(r), 1.0});
  if (scale < 1e-4) {
    // series: sum_n lambda^n / n! * (r^{n+2} - l^{n+2}) / (n+2)
    double total = 0.0, lam_pow = 1.0, fact = 1.0;
    double rp = r * r, lp = l * l;
    for (int n = 0; n <= 8; ++n) {
      total += lam_pow / fact * (rp - lp) / (n + 2);
      lam_pow *= lambda;
      fact *= (n + 1);
      rp *= r;
      lp *= l;
    }
    return total;
  }
  auto prim = [lambda](double x) {
    return std::exp(lambda * x) * (lambda * x - 1.0) / (lambda * lambda);
  };
  return prim(r) - prim(l);
}

}  // namespace

KernelMeasure::KernelMeasure(std::vector<Atom> atoms, std::vector<Bin> bins,
                             bool allow_zero_atom)
    : atoms_(std::move(atoms)), bins_(std::move(bins)) {
  for (const auto& a : atoms_) {
    if (!(a.mass > 0.0)) throw std::invalid_argument("kernel: atom mass must be > 0");
    if (a.pos < -1.0 - 1e-15 || a.pos > 1.0 + 1e-15)
      throw std::invalid_argument("kernel: atom outside [-1,1] (hypothesis J1)");
    if (a.pos == 0.0 && !allow_zero_atom)
      throw std::invalid_argument("kernel: atom at 0 (violates J2; normalize first)");
  }
  std::vector<Bin> sorted = bins_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Bin& a, const Bin& b) { return a.left < b.left; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& b = sorted[i];
    if (!(b.left < b.right)) throw std::invalid_argument("kernel: bin needs left < right");
    if (b.height < 0.0) throw std::invalid_argument("kernel: bin height must be >= 0");
    if (b.left < -1.0 - 1e-15 || b.right > 1.0 + 1e-15)
      throw std::invalid_argument("kernel: bin outside [-1,1] (hypothesis J1)");
    if (i > 0 && sorted[i - 1].right > b.left + 1e-15)
      throw std::invalid_argument("kernel: overlapping bins");
  }
  const double mass = total_mass();
  if (std::abs(mass - 1.0) > 1e-9)
    throw std::invalid_argument("kernel: total mass " + std::to_string(mass) + " != 1");
  build_cdf();
}

KernelMeasure KernelMeasure::delta(double pos) {
  return KernelMeasure({{pos, 1.0}}, {});
}

KernelMeasure KernelMeasure::uniform(double left, double right) {
  return KernelMeasure({}, {{left, right, 1.0 / (right - left)}});
}

double KernelMeasure::total_mass() const {
  double s = 0.0, comp = 0.0;  // Kahan
  auto add = [&](double v) {
    double y = v - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  };
  for (const auto& a : atoms_) add(a.mass);
  for (const auto& b : bins_) add(b.height * (b.right - b.left));
  return s;
}

double KernelMeasure::mass_positive() const {
  double s = 0.0;
  for (const auto& a : atoms_)
    if (a.pos > 0.0) s += a.mass;
  for (const auto& b : bins_)
    if (b.right > 0.0) s += b.height * (b.right - std::max(b.left, 0.0));
  return s;
}

double KernelMeasure::zero_atom_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_)
    if (a.pos == 0.0) s += a.mass;
  return s;
}

double KernelMeasure::mean() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.pos * a.mass;
  for (const auto& b : bins_)
    s += b.height * (b.right * b.right - b.left * b.left) / 2.0;
  return s;
}

double KernelMeasure::second_moment() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.pos * a.pos * a.mass;
  for (const auto& b : bins_)
    s += b.height * (b.right * b.right * b.right - b.left * b.left * b.left) / 3.0;
  return s;
}

double KernelMeasure::variance() const {
  const double mu1 = mean();
  return second_moment() - mu1 * mu1;
}

double KernelMeasure::exp_moment(double lambda) const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.mass * std::exp(lambda * a.pos);
  for (const auto& b : bins_) s += b.height * bin_exp_integral(b.left, b.right, lambda);
  return s;
}

double KernelMeasure::exp_x_moment(double lambda) const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.mass * a.pos * std::exp(lambda * a.pos);
  for (const auto& b : bins_) s += b.height * bin_exp_x_integral(b.left, b.right, lambda);
  return s;
}

KernelMeasure KernelMeasure::reversed() const {
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size());
  for (const auto& a : atoms_) atoms.push_back({-a.pos, a.mass});
  std::vector<Bin> bins;
  bins.reserve(bins_.size());
  for (const auto& b : bins_) bins.push_back({-b.right, -b.left, b.height});
  return KernelMeasure(std::move(atoms), std::move(bins), true);
}

double KernelMeasure::support_min() const {
  double m = 1.0;
  for (const auto& a : atoms_) m = std::min(m, a.pos);
  for (const auto& b : bins_)
    if (b.height > 0.0) m = std::min(m, b.left);
  return m;
}

double KernelMeasure::support_max() const {
  double m = -1.0;
  for (const auto& a : atoms_) m = std::max(m, a.pos);
  for (const auto& b : bins_)
    if (b.height > 0.0) m = std::max(m, b.right);
  return m;
}

void KernelMeasure::build_cdf() {
  cum_.clear();
  cum_.reserve(atoms_.size() + bins_.size());
  double acc = 0.0;
  for (const auto& a : atoms_) {
    acc += a.mass;
    cum_.push_back(acc);
  }
  for (const auto& b : bins_) {
    acc += b.height * (b.right - b.left);
    cum_.push_back(acc);
  }
  if (!cum_.empty()) cum_.back() = std::max(cum_.back(), 1.0);
}

double KernelMeasure::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - cum_.begin());
  if (idx >= cum_.size()) idx = cum_.size() - 1;
  if (idx < atoms_.size()) return atoms_[idx].pos;
  const auto& b = bins_[idx - atoms_.size()];
  const double prev = (idx == 0) ? 0.0 : cum_[idx - 1];
  const double frac = (u - prev) / (cum_[idx] - prev);
  return b.left + frac * (b.right - b.left);
}

std::string KernelMeasure::to_json() const {
  nlohmann::json j;
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : atoms_) j["atoms"].push_back({{"pos", a.pos}, {"mass", a.mass}});
  j["bins"] = nlohmann::json::array();
  for (const auto& b : bins_)
    j["bins"].push_back({{"left", b.left}, {"right", b.right}, {"height", b.height}});
  return j.dump(2);
}

KernelMeasure KernelMeasure::from_json(const std::string& text, bool allow_zero_atom) {
  const auto j = nlohmann::json::parse(text);
  std::vector<Atom> atoms;
  std::vector<Bin> bins;
  if (j.contains("atoms"))
    for (const auto& a : j["atoms"])
      atoms.push_back({a.at("pos").get<double>(), a.at("mass").get<double>()});
  if (j.contains("bins"))
    for (const auto& b : j["bins"])
      bins.push_back({b.at("left").get<double>(), b.at("right").get<double>(),
                      b.at("height").get<double>()});
  return KernelMeasure(std::move(atoms), std::move(bins), allow_zero_atom);
}

KernelMeasure KernelMeasure::load(const std::string& path, bool allow_zero_atom) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open kernel file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), allow_zero_atom);
}

std::pair<double, KernelMeasure> normalize(double mu, const KernelMeasure& raw) {
  const double a = raw.zero_atom_mass();
  if (a == 0.0) {
    return {mu, KernelMeasure(raw.atoms(), raw.bins())};
  }
  if (a >= 1.0 - kMassTol)
    throw std::invalid_argument("normalize: measure concentrated at 0 is degenerate");
  std::vector<Atom> atoms;
  for (const auto& at : raw.atoms())
    if (at.pos != 0.0) atoms.push_back({at.pos, at.mass / (1.0 - a)});
  std::vector<Bin> bins;
  for (const auto& b : raw.bins())
    bins.push_back({b.left, b.right, b.height / (1.0 - a)});
  return {(1.0 - a) * mu, KernelMeasure(std::move(atoms), std::move(bins))};
}

TiltedKernel tilt(const KernelMeasure& J, double mu, double lambda_star,
                  std::optional<double> c_star) {
  if (!(lambda_star > 0.0)) throw std::invalid_argument("tilt: lambda* must be > 0");
  const double nu = mu * J.exp_moment(lambda_star);
  const double w = mu / nu;

  std::vector<Atom> atoms;
  atoms.reserve(J.atoms().size());
  for (const auto& a : J.atoms())
    atoms.push_back({a.pos, w * a.mass * std::exp(lambda_star * a.pos)});

  // Sub-bin width chosen so the uniform-within-sub-bin approximation biases
  // the mean of K by less than ~1e-9 (bias ~ lambda w^2 / 12 per unit mass).
  const double target_w = std::sqrt(12e-9 / std::max(lambda_star, 1e-6));
  std::vector<Bin> bins;
  for (const auto& b : J.bins()) {
    if (b.height == 0.0) continue;
    const double width = b.right - b.left;
    const int n = std::max(1, static_cast<int>(std::ceil(width / target_w)));
    const double ws = width / n;
    for (int k = 0; k < n; ++k) {
      const double l = b.left + k * ws;
      const double r = (k == n - 1) ? b.right : l + ws;
      const double mass = w * b.height * bin_exp_integral(l, r, lambda_star);
      bins.push_back({l, r, mass / (r - l)});
    }
  }

  // exact renormalization of the representation
  double total = 0.0;
  for (const auto& a : atoms) total += a.mass;
  for (const auto& b : bins) total += b.height * (b.right - b.left);
  for (auto& a : atoms) a.mass /= total;
  for (auto& b : bins) b.height /= total;

  KernelMeasure base(std::move(atoms), std::move(bins));
  const double m = base.mean();
  const double var = base.variance();
  if (c_star) {
    if (std::abs(m - *c_star / nu) > 1e-8)
      throw std::invalid_argument("tilt: mean(K) != c*/nu; inconsistent (lambda*, c*)");
  }
  return TiltedKernel{std::move(base), nu, m, var};
}

}  // namespace frontlab
