// frontlab: command-line driver for the nonlocal-front laboratory.
//
// Subcommands: dispersion, classify, simulate, fit, brw, duality, ballot,
// critical, trapping-front, validate. Exit code 0 iff all declared checks
// pass, 1 on a check failure (with a machine-readable failure JSON on
// stdout), 2 on usage errors.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "frontlab/analytic.hpp"
#include "frontlab/brw.hpp"
#include "frontlab/config_io.hpp"
#include "frontlab/dispersion.hpp"
#include "frontlab/evolve.hpp"
#include "frontlab/kernel.hpp"
#include "frontlab/reaction.hpp"
#include "frontlab/walks.hpp"

using nlohmann::json;
using namespace frontlab;

namespace {

int fail(const std::string& what, const json& detail = json::object()) {
  json j;
  j["status"] = "fail";
  j["what"] = what;
  if (!detail.empty()) j["detail"] = detail;
  std::cout << j.dump(2) << "\n";
  return 1;
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    out.push_back(std::stod(csv.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

OffspringLaw parse_kappa(const std::string& text) {
  // "2:0.7,3:0.3"
  OffspringLaw law;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string item = text.substr(pos, next - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--kappa entries must look like k:prob");
    law.probabilities.push_back(
        {std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    pos = next + 1;
  }
  law.validate();
  return law;
}

// Integrates on a fixed window and returns the field at the horizon.
Field evolve_to(const KernelMeasure& J, double mu, const Reaction& f,
                double dx, double x_left, double x_right, double horizon,
                std::optional<double> dt_opt = std::nullopt) {
  Field u = make_step_field(dx, x_left, x_right);
  ConvPlan plan(J, dx);
  double dt = dt_opt ? *dt_opt : 0.4 / (mu + f.fprime0());
  const long n = static_cast<long>(std::ceil(horizon / dt - 1e-12));
  dt = horizon / static_cast<double>(n);
  for (long i = 0; i < n; ++i) step(u, plan, mu, f, dt);
  return u;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for nonlocal KPP fronts"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  // global flags
  std::uint64_t g_seed = 0;
  std::string g_out;
  int g_threads = 0;
  bool g_json = false;
  app.add_option("--seed", g_seed, "base RNG seed")->capture_default_str();
  app.add_option("--out", g_out, "output path (default: stdout/cwd)");
  app.add_option("--threads", g_threads, "worker thread cap (0 = default)");
  app.add_flag("--json", g_json, "machine-readable output only");

  std::string kernel_path, reaction_path, trace_path, tilted_path, check_name =
      "sandwich", kappa_text = "2:1.0", thetas_text = "0.5", x_text, t_text,
      dt_text = "auto", window_text;
  double mu = 1.0, horizon = 100.0, dx = 0.05, r_rate = 1.0, t_time = 5.0,
         theta = 0.5, nu = 1.0, c_drift = 0.0, D_coef = 0.0, L_target = 2.0,
         p_power = 2.0, width = 60.0;
  long trials = 100000, cap = 0;
  int depth = 10;
  std::optional<double> fprime0_opt;

  auto add_problem = [&](CLI::App* c, bool need_reaction = true) {
    c->add_option("--kernel", kernel_path, "kernel JSON file")->required();
    if (need_reaction)
      c->add_option("--reaction", reaction_path, "reaction JSON file");
    c->add_option("--mu", mu, "jump rate")->capture_default_str();
  };

  auto* cmd_disp = app.add_subcommand("dispersion",
      "speed/decay report from the dispersion relation");
  add_problem(cmd_disp);
  cmd_disp->add_option("--fprime0", fprime0_opt, "f'(0) directly, without a reaction file");

  auto* cmd_cls = app.add_subcommand("classify", "regular/trapping/critical label");
  add_problem(cmd_cls);
  cmd_cls->add_option("--fprime0", fprime0_opt, "f'(0) directly");

  auto* cmd_sim = app.add_subcommand("simulate", "PDE front-position trace");
  add_problem(cmd_sim);
  cmd_sim->add_option("--dx", dx)->capture_default_str();
  cmd_sim->add_option("--dt", dt_text, "time step or \"auto\"")->capture_default_str();
  cmd_sim->add_option("--horizon", horizon)->capture_default_str();
  cmd_sim->add_option("--thetas", thetas_text, "comma list of levels")->capture_default_str();
  cmd_sim->add_option("--window", width, "moving-window width")->capture_default_str();

  auto* cmd_fit = app.add_subcommand("fit", "log-correction fit of a trace");
  cmd_fit->add_option("--trace", trace_path, "trace CSV from simulate")->required();
  cmd_fit->add_option("--theta", theta)->capture_default_str();
  cmd_fit->add_option("--window", window_text, "t_min,t_max")->required();

  auto* cmd_brw = app.add_subcommand("brw", "branching random walk maximum CDF");
  cmd_brw->add_option("--kernel", kernel_path)->required();
  cmd_brw->add_option("--mu", mu)->capture_default_str();
  cmd_brw->add_option("--r", r_rate, "branch rate")->capture_default_str();
  cmd_brw->add_option("--kappa", kappa_text, "offspring law k:prob,...")->capture_default_str();
  cmd_brw->add_option("--t", t_time, "horizon")->capture_default_str();
  cmd_brw->add_option("--trials", trials)->capture_default_str();
  cmd_brw->add_option("--cap", cap, "population cap (0 = auto)");
  cmd_brw->add_option("--x", x_text, "CDF evaluation points (default: span)");

  auto* cmd_dual = app.add_subcommand("duality",
      "BRW maximum law against the PDE solution");
  add_problem(cmd_dual);
  cmd_dual->add_option("--t", t_time)->capture_default_str();
  cmd_dual->add_option("--trials", trials)->capture_default_str();
  cmd_dual->add_option("--dx", dx)->capture_default_str();
  cmd_dual->add_option("--x", x_text, "comparison points (default -8..8)");

  auto* cmd_ballot = app.add_subcommand("ballot",
      "ballot-type path functional of the log-drifting walk");
  cmd_ballot->add_option("--kernel-tilted", tilted_path,
      "jump law of the centered walk (already reversed/tilted)")->required();
  cmd_ballot->add_option("--nu", nu, "jump rate")->required();
  cmd_ballot->add_option("--c", c_drift, "constant drift")->required();
  cmd_ballot->add_option("--D", D_coef, "log-drift coefficient")->capture_default_str();
  cmd_ballot->add_option("--t", t_text, "comma list of horizons")->required();
  cmd_ballot->add_option("--x", x_text, "comma list of starting points")->required();
  cmd_ballot->add_option("--L", L_target)->capture_default_str();
  cmd_ballot->add_option("--trials", trials)->capture_default_str();

  auto* cmd_crit = app.add_subcommand("critical",
      "critical-case front against the analytic sandwich");
  cmd_crit->add_option("--p", p_power, "reaction u - u^p")->capture_default_str();
  cmd_crit->add_option("--horizon", horizon)->capture_default_str();
  cmd_crit->add_option("--dx", dx)->capture_default_str();
  cmd_crit->add_option("--check", check_name, "sandwich")->capture_default_str();

  auto* cmd_trap = app.add_subcommand("trapping-front",
      "tabulate the stationary trapping front");
  cmd_trap->add_option("--kernel", kernel_path, "kernel JSON (default worked case)");
  cmd_trap->add_option("--reaction", reaction_path, "reaction JSON (default u-u^2)");
  cmd_trap->add_option("--mu", mu)->capture_default_str();
  cmd_trap->add_option("--depth", depth)->capture_default_str();
  cmd_trap->add_option("--dx", dx, "table resolution")->default_val(0.001);

  auto* cmd_val = app.add_subcommand("validate",
      "KPP conditions and probabilistic decomposition of a reaction");
  cmd_val->add_option("--reaction", reaction_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  resolve_threads(g_threads);

  try {
    if (*cmd_disp || *cmd_cls) {
      auto [mu2, J] = normalize(mu, KernelMeasure::load(kernel_path, true));
      double fp0;
      if (fprime0_opt)
        fp0 = *fprime0_opt;
      else if (!reaction_path.empty())
        fp0 = Reaction::load(reaction_path).fprime0();
      else {
        std::cerr << "need --reaction or --fprime0\n";
        return 2;
      }
      if (*cmd_cls) {
        std::cout << to_string(classify(J, mu2, fp0)) << "\n";
        return 0;
      }
      emit(json::parse(dispersion_report(J, mu2, fp0).to_json()), g_out);
      return 0;
    }

    if (*cmd_sim) {
      auto [mu2, J] = normalize(mu, KernelMeasure::load(kernel_path, true));
      Reaction f = Reaction::load(reaction_path);
      RunConfig cfg;
      cfg.dx = dx;
      cfg.horizon = horizon;
      cfg.window_width = width;
      cfg.thetas = parse_list(thetas_text);
      if (dt_text != "auto") cfg.dt = std::stod(dt_text);
      FrontTrace trace = run(J, mu2, f, cfg);
      const auto rep = dispersion_report(J, mu2, f.fprime0());
      if (rep.c_star) trace.metadata["c_star"] = *rep.c_star;
      if (rep.lambda_star) trace.metadata["lambda_star"] = *rep.lambda_star;
      trace.write_csv(g_out.empty() ? "trace.csv" : g_out);
      return 0;
    }

    if (*cmd_fit) {
      FrontTrace trace = FrontTrace::read_csv(trace_path);
      const auto w = parse_list(window_text);
      if (w.size() != 2) {
        std::cerr << "--window wants t_min,t_max\n";
        return 2;
      }
      if (!trace.metadata.count("c_star"))
        return fail("trace has no c_star metadata; refit from simulate output");
      const ShiftFit fit =
          fit_bramson(trace, theta, trace.metadata.at("c_star"), w[0], w[1]);
      emit(json::parse(fit.to_json()), g_out);
      return 0;
    }

    if (*cmd_brw) {
      auto [mu2, J] = normalize(mu, KernelMeasure::load(kernel_path, true));
      BrwConfig cfg{mu2, J, r_rate, parse_kappa(kappa_text),
                    t_time, trials, g_seed, cap, {}};
      if (cap == 0)
        cfg.population_cap = static_cast<long>(
            20.0 * std::exp(cfg.r * (cfg.kappa.mean() - 1.0) * t_time)) + 100;
      std::vector<double> xs;
      if (!x_text.empty()) xs = parse_list(x_text);
      else
        for (double x = -2.0 * t_time - 2.0; x <= 2.0 * t_time + 2.0; x += 0.5)
          xs.push_back(x);
      const BrwStats stats = simulate(cfg, xs);
      std::string csv = "x,p_max_gt_x,stderr\n";
      for (const auto& pt : stats.max_cdf_points)
        csv += format_double(pt.x) + "," + format_double(1.0 - pt.p_max_le_x) +
               "," + format_double(pt.stderr_) + "\n";
      if (g_out.empty()) std::cout << csv;
      else write_text(g_out, csv);
      return stats.aborted_trials == 0 ? 0
                                       : fail("population cap hit",
                                              {{"aborted", stats.aborted_trials}});
    }

    if (*cmd_dual) {
      auto [mu2, J] = normalize(mu, KernelMeasure::load(kernel_path, true));
      Reaction f = Reaction::load(reaction_path);
      std::string reason;
      auto dec = probabilistic_decompose(f, &reason);
      if (!dec) return fail("reaction is not probabilistic: " + reason);
      const double half = 2.0 * t_time + 8.0;
      Field u = evolve_to(J, mu2, f, dx, -half, half, t_time);
      BrwConfig cfg{mu2, J, dec->r, dec->kappa, t_time, trials, g_seed, 0, {}};
      cfg.population_cap = static_cast<long>(
          20.0 * std::exp(dec->r * (dec->kappa.mean() - 1.0) * t_time)) + 100;
      std::vector<double> xs = x_text.empty()
          ? [] { std::vector<double> v; for (double x = -8; x <= 8; x += 1) v.push_back(x); return v; }()
          : parse_list(x_text);
      const DualityReport rep = duality_check(cfg, f, u, xs);
      emit(json::parse(rep.to_json()), g_out);
      return rep.worst_sigmas <= 3.0 ? 0
                                     : fail("duality mismatch beyond 3 sigma",
                                            json::parse(rep.to_json()));
    }

    if (*cmd_ballot) {
      DriftWalkSpec spec{nu, KernelMeasure::load(tilted_path), c_drift,
                         D_coef, 1.0, L_target};
      const BallotBandReport rep = ballot_band_check(
          spec, parse_list(t_text), parse_list(x_text), trials, g_seed);
      emit(json::parse(rep.to_json()), g_out);
      return 0;
    }

    if (*cmd_crit) {
      if (check_name != "sandwich") {
        std::cerr << "unknown --check " << check_name << "\n";
        return 2;
      }
      const KernelMeasure J = KernelMeasure::delta(-1.0);
      const Reaction f = Reaction::minus_power(1.0, p_power);
      // Fixed wide window; the front only sinks like -log log t. Leftward
      // 1 - U ~ p^x, so clearing the 1e-12 edge tolerance costs
      // 12 ln 10 / ln p cells beyond the lowest front position.
      const double x_left = std::floor(analytic::sigma_minus(p_power, horizon) -
                                       12.0 * std::log(10.0) / std::log(p_power)) - 4.0;
      RunConfig cfg;
      cfg.dx = dx;
      cfg.horizon = horizon;
      cfg.window_width = 6.0 - x_left;
      cfg.x_left = x_left;
      cfg.recenter = false;
      cfg.thetas = {0.5};
      FrontTrace trace = run(J, 1.0, f, cfg);
      const double off_lo = analytic::front_inverse(p_power, 0.5 / analytic::omega(p_power));
      const double off_hi = analytic::front_inverse(p_power, 0.5);
      json pts = json::array();
      bool ok = true;
      for (const auto& s : trace.samples) {
        if (s.t < 10.0) continue;
        const double lo = analytic::sigma_minus(p_power, s.t) + off_hi;
        const double hi = analytic::sigma_plus(p_power, s.t) + off_lo;
        const bool in = s.sigma[0] >= lo - 1e-9 && s.sigma[0] <= hi + 1e-9;
        ok = ok && in;
        pts.push_back({{"t", s.t}, {"sigma", s.sigma[0]}, {"lo", lo}, {"hi", hi},
                       {"ok", in}});
      }
      json j;
      j["check"] = "sandwich";
      j["p"] = p_power;
      j["points"] = pts;
      j["pass"] = ok;
      emit(j, g_out);
      return ok ? 0 : fail("sandwich violated", j);
    }

    if (*cmd_trap) {
      KernelMeasure J = kernel_path.empty() ? KernelMeasure::uniform(-1.0, 0.0)
                                            : KernelMeasure::load(kernel_path);
      Reaction f = reaction_path.empty() ? Reaction::logistic(1.0)
                                         : Reaction::load(reaction_path);
      const auto tab = analytic::trapping_front(J, mu, f, depth, dx);
      std::string csv = "# dx=" + format_double(tab.dx) +
                        "\n# saturated=" + (tab.saturated ? "1" : "0") + "\nx,U\n";
      for (std::size_t i = 0; i < tab.values.size(); ++i)
        csv += format_double(-static_cast<double>(i) * tab.dx) + "," +
               format_double(tab.values[i]) + "\n";
      if (g_out.empty()) std::cout << csv;
      else write_text(g_out, csv);
      return 0;
    }

    if (*cmd_val) {
      Reaction f = Reaction::load(reaction_path);
      const ValidationReport rep = f.validate();
      std::string reason;
      auto dec = probabilistic_decompose(f, &reason);
      json j;
      j["fprime0"] = rep.fprime0;
      j["kpp_f1"] = rep.f1_pass;
      j["kpp_f2"] = rep.f2_pass;
      j["kpp_f3"] = rep.f3_pass;
      j["holder_gamma"] = rep.holder_gamma;
      j["holder_CF"] = rep.holder_CF;
      if (dec) {
        json kap = json::array();
        for (auto [k, p] : dec->kappa.probabilities)
          kap.push_back({{"k", k}, {"p", p}});
        j["probabilistic"] = {{"r", dec->r}, {"kappa", kap}};
      } else {
        j["probabilistic"] = nullptr;
        j["note"] = "not probabilistic: " + reason;
      }
      emit(j, g_out);
      return rep.all_pass() ? 0 : fail("KPP conditions violated", j);
    }
  } catch (const SpecError& e) {
    json issues = json::array();
    for (const auto& is : e.issues())
      issues.push_back({{"pointer", is.pointer}, {"message", is.message}});
    return fail("spec validation", issues);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return 2;
}
