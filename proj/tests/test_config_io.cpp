#include <cstdio>
#include <cstdlib>

#include "doctest.h"
#include "frontlab/config_io.hpp"
#include "frontlab/dispersion.hpp"

using namespace frontlab;

namespace {

const char* kMinimalCritical = R"({
  "kernel": { "atoms": [ { "pos": -1.0, "mass": 1.0 } ] },
  "reaction": { "family": "logistic", "a": 1.0 },
  "mu": 1.0
})";

}  // namespace

TEST_CASE("minimal critical spec loads and classifies") {
  const ProblemSpec spec = parse_spec(kMinimalCritical);
  CHECK(spec.mu == 1.0);
  CHECK(classify(spec.kernel, spec.mu, spec.reaction.fprime0()) ==
        Classification::Critical);
  // auto dt rule
  CHECK(spec.resolved_dt() == doctest::Approx(0.4 / 2.0));
}

TEST_CASE("bad kernel mass is rejected with a pointer") {
  const char* text = R"({
    "kernel": { "atoms": [ { "pos": -1.0, "mass": 0.999 } ] },
    "reaction": { "family": "logistic", "a": 1.0 },
    "mu": 1.0
  })";
  try {
    parse_spec(text);
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    REQUIRE(!e.issues().empty());
    CHECK(e.issues()[0].pointer == "/kernel");
    CHECK(std::string(e.issues()[0].message).find("mass") != std::string::npos);
  }
}

TEST_CASE("dt above the stability budget is rejected with the budget") {
  const char* text = R"({
    "kernel": { "atoms": [ { "pos": -1.0, "mass": 1.0 } ] },
    "reaction": { "family": "logistic", "a": 1.0 },
    "mu": 1.0,
    "numerics": { "dt": 0.5 }
  })";
  try {
    parse_spec(text);
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    REQUIRE(!e.issues().empty());
    CHECK(e.issues()[0].pointer == "/numerics/dt");
    CHECK(std::string(e.issues()[0].message).find("0.25") != std::string::npos);
  }
}

TEST_CASE("off-grid atoms and bad thetas are caught") {
  const char* text = R"({
    "kernel": { "atoms": [ { "pos": -0.333, "mass": 1.0 } ] },
    "reaction": { "family": "logistic", "a": 1.0 },
    "mu": 1.0,
    "numerics": { "dx": 0.05 }
  })";
  CHECK_THROWS_AS(parse_spec(text), SpecError);

  const char* text2 = R"({
    "kernel": { "atoms": [ { "pos": -1.0, "mass": 1.0 } ] },
    "reaction": { "family": "logistic", "a": 1.0 },
    "mu": 1.0,
    "numerics": { "thetas": [0.5, 1.5] }
  })";
  try {
    parse_spec(text2);
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    CHECK(e.issues()[0].pointer == "/numerics/thetas/1");
  }
}

TEST_CASE("parse failure carries a root-level issue") {
  CHECK_THROWS_AS(parse_spec("{ not json"), SpecError);
}

TEST_CASE("17-digit floats round-trip through strtod") {
  for (double v : {1.0 / 3.0, 0.1, 1e-300, 1.5088795615383201, -2.0 / 7.0}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("fnv digest: determinism and sensitivity") {
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("abc") == fnv1a("abc"));
  CHECK(fnv1a("abc") != fnv1a("abd"));
}

TEST_CASE("run manifest digests outputs deterministically") {
  const std::string path = "manifest_test_artifact.csv";
  write_text(path, "x,y\n1,2\n");
  RunManifest m;
  m.spec_hash = fnv1a(kMinimalCritical);
  m.add_output(path);
  const auto d1 = m.output_digests.at(path);
  write_text(path, "x,y\n1,2\n");
  m.add_output(path);
  CHECK(m.output_digests.at(path) == d1);
  CHECK(!m.to_json().empty());
  std::remove(path.c_str());
}

TEST_CASE("thread cap resolution") {
  // env var caps; a smaller CLI request lowers further
  setenv("FRONTLAB_THREADS", "2", 1);
  CHECK(resolve_threads(0) == 2);
  CHECK(resolve_threads(1) == 1);
  CHECK(resolve_threads(8) == 2);
  unsetenv("FRONTLAB_THREADS");
  CHECK(resolve_threads(1) == 1);
}

TEST_CASE("seed lookup defaults to zero") {
  ProblemSpec spec = parse_spec(kMinimalCritical);
  CHECK(spec.seed_for("brw") == 0);
  spec.seeds["brw"] = 42;
  CHECK(spec.seed_for("brw") == 42);
}
