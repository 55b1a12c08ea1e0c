#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frontlab/kernel.hpp"
#include "frontlab/reaction.hpp"

namespace frontlab {

// One schema/validation failure, located by a JSON pointer into the spec file.
struct SpecIssue {
  std::string pointer;  // e.g. "/kernel/atoms/0/mass"
  std::string message;
};

class SpecError : public std::runtime_error {
 public:
  explicit SpecError(std::vector<SpecIssue> issues);
  const std::vector<SpecIssue>& issues() const { return issues_; }

 private:
  std::vector<SpecIssue> issues_;
};

struct Numerics {
  double dx = 0.05;
  std::optional<double> dt;  // empty = "auto" = 0.4/(mu + f'(0))
  double horizon = 100.0;
  double window_width = 40.0;
  std::vector<double> thetas = {0.5};
};

struct ProblemSpec {
  KernelMeasure kernel = KernelMeasure::delta(-1.0);
  Reaction reaction = Reaction::logistic(1.0);
  double mu = 1.0;
  Numerics numerics;
  std::map<std::string, std::uint64_t> seeds;

  double resolved_dt() const;  // explicit dt, or the auto rule
  std::uint64_t seed_for(const std::string& task) const;  // 0 if absent
};

// Parses and fully validates; throws SpecError listing every problem found.
ProblemSpec load_spec(const std::string& path);
ProblemSpec parse_spec(const std::string& text, const std::string& base_dir = ".");

// 17 significant digits; round-trips exactly through strtod.
std::string format_double(double v);

void write_text(const std::string& path, const std::string& content);

std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t fnv1a_file(const std::string& path);

struct RunManifest {
  std::uint64_t spec_hash = 0;
  std::string tool_version;
  double wall_seconds = 0.0;
  std::map<std::string, std::uint64_t> output_digests;

  void add_output(const std::string& path);  // digests the file on disk
  std::string to_json() const;
};

extern const char* kToolVersion;

// Worker-count policy: FRONTLAB_THREADS caps everything; a CLI request may
// only lower the cap. Returns the count actually applied to OpenMP.
int resolve_threads(int requested);

}  // namespace frontlab
