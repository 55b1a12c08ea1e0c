#include "frontlab/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

namespace frontlab {

using nlohmann::json;

const char* kToolVersion = "frontlab 0.1.0";

namespace {

std::string join_issues(const std::vector<SpecIssue>& issues) {
  std::ostringstream os;
  os << "spec validation failed:";
  for (const auto& e : issues) os << "\n  " << e.pointer << ": " << e.message;
  return os.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SpecError::SpecError(std::vector<SpecIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

double ProblemSpec::resolved_dt() const {
  if (numerics.dt) return *numerics.dt;
  return 0.4 / (mu + reaction.fprime0());
}

std::uint64_t ProblemSpec::seed_for(const std::string& task) const {
  auto it = seeds.find(task);
  return it == seeds.end() ? 0 : it->second;
}

ProblemSpec parse_spec(const std::string& text, const std::string& base_dir) {
  std::vector<SpecIssue> issues;
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw SpecError({{"", std::string("JSON parse failure: ") + e.what()}});
  }

  ProblemSpec spec;

  // A sub-object may be given inline or as a path to another JSON file.
  auto resolve = [&](const char* key) -> std::string {
    const json& node = j.at(key);
    if (node.is_string()) {
      std::string p = node.get<std::string>();
      if (!p.empty() && p.front() != '/') p = base_dir + "/" + p;
      return slurp(p);
    }
    return node.dump();
  };

  bool have_kernel = false, have_reaction = false;
  if (!j.contains("kernel")) {
    issues.push_back({"/kernel", "missing"});
  } else {
    try {
      spec.kernel = KernelMeasure::from_json(resolve("kernel"), true);
      have_kernel = true;
    } catch (const std::exception& e) {
      issues.push_back({"/kernel", e.what()});
    }
  }
  if (!j.contains("reaction")) {
    issues.push_back({"/reaction", "missing"});
  } else {
    try {
      spec.reaction = Reaction::from_json(resolve("reaction"));
      have_reaction = true;
    } catch (const std::exception& e) {
      issues.push_back({"/reaction", e.what()});
    }
  }

  if (!j.contains("mu") || !j["mu"].is_number()) {
    issues.push_back({"/mu", "missing or not a number"});
  } else {
    spec.mu = j["mu"].get<double>();
    if (!(spec.mu > 0.0)) issues.push_back({"/mu", "must be > 0"});
  }

  if (j.contains("numerics")) {
    const json& n = j["numerics"];
    auto num = [&](const char* key, double& out, const char* cond,
                   auto ok) {
      if (!n.contains(key)) return;
      if (!n[key].is_number()) {
        issues.push_back({std::string("/numerics/") + key, "not a number"});
        return;
      }
      out = n[key].get<double>();
      if (!ok(out))
        issues.push_back({std::string("/numerics/") + key, cond});
    };
    num("dx", spec.numerics.dx, "must be > 0", [](double v) { return v > 0.0; });
    num("horizon", spec.numerics.horizon, "must be > 0",
        [](double v) { return v > 0.0; });
    num("window_width", spec.numerics.window_width, "must be > 0",
        [](double v) { return v > 0.0; });
    if (n.contains("dt")) {
      if (n["dt"].is_string()) {
        if (n["dt"].get<std::string>() != "auto")
          issues.push_back({"/numerics/dt", "must be a number or \"auto\""});
      } else if (n["dt"].is_number()) {
        const double dt = n["dt"].get<double>();
        if (!(dt > 0.0)) issues.push_back({"/numerics/dt", "must be > 0"});
        spec.numerics.dt = dt;
      } else {
        issues.push_back({"/numerics/dt", "must be a number or \"auto\""});
      }
    }
    if (n.contains("thetas")) {
      if (!n["thetas"].is_array()) {
        issues.push_back({"/numerics/thetas", "must be an array"});
      } else {
        spec.numerics.thetas.clear();
        std::size_t i = 0;
        for (const auto& e : n["thetas"]) {
          const double th = e.is_number() ? e.get<double>() : -1.0;
          if (!(th > 0.0 && th < 1.0))
            issues.push_back({"/numerics/thetas/" + std::to_string(i),
                              "must lie in (0,1)"});
          spec.numerics.thetas.push_back(th);
          ++i;
        }
      }
    }
  }

  if (j.contains("seeds")) {
    if (!j["seeds"].is_object()) {
      issues.push_back({"/seeds", "must be an object"});
    } else {
      for (const auto& [k, v] : j["seeds"].items()) {
        if (!v.is_number_unsigned())
          issues.push_back({"/seeds/" + k, "must be a non-negative integer"});
        else
          spec.seeds[k] = v.get<std::uint64_t>();
      }
    }
  }

  // Cross-field checks need both pieces loaded.
  if (have_kernel && have_reaction && issues.empty()) {
    const double budget = 0.5 / (spec.mu + spec.reaction.fprime0());
    if (spec.numerics.dt && *spec.numerics.dt > budget) {
      std::ostringstream os;
      os << "dt " << *spec.numerics.dt << " exceeds stability budget "
         << budget << " = 0.5/(mu + f'(0))";
      issues.push_back({"/numerics/dt", os.str()});
    }
    std::size_t ai = 0;
    for (const auto& a : spec.kernel.atoms()) {
      const double cells = a.pos / spec.numerics.dx;
      if (std::abs(cells - std::round(cells)) > 1e-9)
        issues.push_back(
            {"/kernel/atoms/" + std::to_string(ai) + "/pos",
             "atom must sit on a multiple of dx for exact convolution"});
      ++ai;
    }
  }

  if (!issues.empty()) throw SpecError(std::move(issues));
  return spec;
}

ProblemSpec load_spec(const std::string& path) {
  std::string dir = ".";
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return parse_spec(slurp(path), dir);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failure on " + path);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::string& path) { return fnv1a(slurp(path)); }

void RunManifest::add_output(const std::string& path) {
  output_digests[path] = fnv1a_file(path);
}

std::string RunManifest::to_json() const {
  json j;
  j["spec_hash"] = spec_hash;
  j["tool_version"] = tool_version.empty() ? kToolVersion : tool_version;
  j["wall_seconds"] = wall_seconds;
  json d = json::object();
  for (const auto& [k, v] : output_digests) d[k] = v;
  j["output_digests"] = d;
  return j.dump(2);
}

int resolve_threads(int requested) {
#ifdef _OPENMP
  int cap = omp_get_max_threads();
#else
  int cap = 1;
#endif
  if (const char* env = std::getenv("FRONTLAB_THREADS")) {
    const int e = std::atoi(env);
    if (e > 0) cap = e;
  }
  int n = (requested > 0 && requested < cap) ? requested : cap;
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
  return n;
}

}  // namespace frontlab
